#include "pbntune/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "pbntune/error.hpp"

namespace pbntune {

namespace {

struct Token {
  enum class Kind { Word, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '+';
}

std::vector<Token> tokenize(const std::string& text, std::size_t first_line) {
  std::vector<Token> out;
  std::size_t line = first_line;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (is_word_char(c)) {
      Token t{Token::Kind::Word, "", line, col};
      while (i < text.size() && is_word_char(text[i])) {
        t.text += text[i];
        advance();
      }
      out.push_back(std::move(t));
    } else {
      Token t{Token::Kind::Punct, std::string(1, c), line, col};
      advance();
      if ((c == '<' || c == '>') && i < text.size() && text[i] == '=') {
        t.text += '=';
        advance();
      }
      out.push_back(std::move(t));
    }
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

[[noreturn]] void fail_at(ErrorKind kind, const Token& t, const std::string& msg) {
  throw Error(kind, "line " + std::to_string(t.line) + ", col " + std::to_string(t.col) + ": " + msg);
}

class Parser {
 public:
  explicit Parser(const std::string& text, std::size_t first_line = 1) : tokens_(tokenize(text, first_line)) {}

  const Token& peek() const { return tokens_[pos_]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  Token next() { return at_end() ? peek() : tokens_[pos_++]; }

  bool accept(const std::string& punct) {
    if (peek().kind == Token::Kind::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }

  Token expect(const std::string& punct) {
    if (!accept(punct)) fail(peek(), "expected '" + punct + "'");
    return tokens_[pos_ - 1];
  }

  Token word(const std::string& what) {
    if (peek().kind != Token::Kind::Word) fail(peek(), "expected " + what);
    return next();
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    fail_at(ErrorKind::Parse, t, t.kind == Token::Kind::End ? msg + " at end of input" : msg);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

mpq_class number(const Token& t) {
  try {
    return parse_decimal(t.text);
  } catch (const Error&) {
    fail_at(ErrorKind::Parse, t, "malformed number '" + t.text + "'");
  }
}

/// Comma separated words up to (not including) `stop`.
std::vector<Token> word_list(Parser& p, const std::string& stop) {
  std::vector<Token> out;
  if (p.peek().kind == Token::Kind::Punct && p.peek().text == stop) return out;
  out.push_back(p.word("a name"));
  while (p.accept(",")) out.push_back(p.word("a name"));
  return out;
}

struct VarDecl {
  Token name;
  std::vector<Token> values;
  std::vector<Token> parents;
};

struct RowDecl {
  Token at;
  std::vector<Token> key;
  std::vector<Token> entries;
};

struct CptDecl {
  Token name;
  std::vector<RowDecl> rows;
};

std::size_t lookup_var(const Network& net, const Token& t) {
  try {
    return net.index_of(t.text);
  } catch (const Error&) {
    fail_at(ErrorKind::UnknownVariable, t, "unknown variable '" + t.text + "'");
  }
}

std::size_t lookup_value(const Network& net, std::size_t var, const Token& t) {
  try {
    return net.value_index(var, t.text);
  } catch (const Error&) {
    fail_at(ErrorKind::UnknownValue, t, "'" + t.text + "' is not a value of " + net.variable(var).name);
  }
}

/// Row index for a parenthesized parent-value key.
std::size_t row_for_key(const Network& net, std::size_t var, const Token& at, const std::vector<Token>& key) {
  const auto& parents = net.variable(var).parents;
  if (key.size() != parents.size()) {
    fail_at(ErrorKind::Parse, at,
            net.variable(var).name + " has " + std::to_string(parents.size()) + " parents, key has " +
                std::to_string(key.size()) + " values");
  }
  std::vector<std::size_t> values;
  for (std::size_t i = 0; i < key.size(); ++i) values.push_back(lookup_value(net, parents[i], key[i]));
  return net.row_index(var, values);
}

}  // namespace

BayesNet parse_network(const std::string& text) {
  Parser p(text);
  std::vector<VarDecl> vars;
  std::vector<CptDecl> cpts;
  while (!p.at_end()) {
    const Token kw = p.word("'var' or 'cpt'");
    if (kw.text == "var") {
      VarDecl d{p.word("variable name"), {}, {}};
      p.expect("{");
      bool seen_values = false;
      while (!p.accept("}")) {
        const Token field = p.word("'values' or 'parents'");
        p.expect(":");
        if (field.text == "values") {
          d.values = word_list(p, ";");
          seen_values = true;
        } else if (field.text == "parents") {
          d.parents = word_list(p, ";");
        } else {
          Parser::fail(field, "unknown field '" + field.text + "'");
        }
        if (!p.accept(";")) {
          if (p.peek().text != "}") Parser::fail(p.peek(), "expected ';' or '}'");
        }
      }
      if (!seen_values) Parser::fail(d.name, "variable '" + d.name.text + "' declares no values");
      vars.push_back(std::move(d));
    } else if (kw.text == "cpt") {
      CptDecl d{p.word("variable name"), {}};
      p.expect("{");
      while (!p.accept("}")) {
        RowDecl row{p.peek(), {}, {}};
        if (p.accept("(")) {
          row.key = word_list(p, ")");
          p.expect(")");
          p.expect(":");
        }
        row.entries.push_back(p.word("a probability"));
        while (p.accept(",")) row.entries.push_back(p.word("a probability"));
        if (!p.accept(";")) {
          if (p.peek().text != "}") Parser::fail(p.peek(), "expected ';' or '}'");
        }
        d.rows.push_back(std::move(row));
      }
      cpts.push_back(std::move(d));
    } else {
      Parser::fail(kw, "expected 'var' or 'cpt', got '" + kw.text + "'");
    }
  }
  if (vars.empty()) throw Error(ErrorKind::Parse, "no variables declared");

  // Structure first; parents may refer to variables declared later.
  std::map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (!index.emplace(vars[v].name.text, v).second) {
      fail_at(ErrorKind::Parse, vars[v].name, "variable '" + vars[v].name.text + "' declared twice");
    }
  }
  std::vector<Variable> variables;
  for (const auto& d : vars) {
    Variable v{d.name.text, {}, {}};
    for (const auto& t : d.values) v.values.push_back(t.text);
    for (const auto& t : d.parents) {
      const auto it = index.find(t.text);
      if (it == index.end()) fail_at(ErrorKind::UnknownVariable, t, "unknown parent '" + t.text + "'");
      v.parents.push_back(it->second);
    }
    variables.push_back(std::move(v));
  }
  std::vector<Cpt> placeholder;
  for (const auto& v : variables) {
    std::size_t rows = 1;
    for (std::size_t p : v.parents) rows *= variables[p].values.size();
    placeholder.push_back({std::vector<CptRow>(rows, CptRow(v.values.size(), Polynomial(0)))});
  }
  Network shape(variables, placeholder);

  std::vector<Cpt> tables = placeholder;
  std::vector<std::vector<bool>> filled(variables.size());
  std::vector<bool> has_cpt(variables.size(), false);
  for (std::size_t v = 0; v < variables.size(); ++v) filled[v].assign(tables[v].rows.size(), false);
  for (const auto& d : cpts) {
    const std::size_t var = lookup_var(shape, d.name);
    if (has_cpt[var]) fail_at(ErrorKind::Parse, d.name, "second cpt block for '" + d.name.text + "'");
    has_cpt[var] = true;
    for (const auto& row : d.rows) {
      const std::size_t r = row_for_key(shape, var, row.at, row.key);
      if (filled[var][r]) fail_at(ErrorKind::Parse, row.at, "row given twice");
      filled[var][r] = true;
      const std::size_t width = variables[var].values.size();
      if (row.entries.size() != width) {
        fail_at(ErrorKind::Parse, row.at,
                "expected " + std::to_string(width) + " entries, got " + std::to_string(row.entries.size()));
      }
      std::vector<mpq_class> q;
      mpq_class sum = 0;
      for (const auto& t : row.entries) {
        q.push_back(number(t));
        if (q.back() < 0 || q.back() > 1) fail_at(ErrorKind::Parse, t, "probability outside [0,1]");
        sum += q.back();
      }
      if (abs(sum - 1) > mpq_class(1, 1000000000)) {
        fail_at(ErrorKind::RowSum, row.at,
                "row of " + d.name.text + " sums to " + std::to_string(sum.get_d()));
      }
      q.back() += 1 - sum;
      if (q.back() < 0) fail_at(ErrorKind::RowSum, row.at, "row residual makes the last entry negative");
      for (std::size_t i = 0; i < width; ++i) tables[var].rows[r][i] = Polynomial(q[i]);
    }
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (!has_cpt[v]) fail_at(ErrorKind::Parse, vars[v].name, "no cpt for '" + vars[v].name.text + "'");
    for (std::size_t r = 0; r < filled[v].size(); ++r) {
      if (!filled[v][r]) {
        fail_at(ErrorKind::Parse, vars[v].name,
                "cpt of '" + vars[v].name.text + "' misses row " + shape.row_label(v, r));
      }
    }
  }
  return BayesNet(shape.with_cpts(std::move(tables)));
}

ParamBN parse_params(const std::string& text, const BayesNet& bn, double delta) {
  const Network& net = bn.network();
  std::vector<ParamSpec> specs;
  std::map<std::string, Interval> intervals;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    Parser p(line, line_no);
    if (p.at_end()) continue;
    const Token kw = p.word("a directive");
    if (kw.text == "covariation") {
      const Token scheme = p.word("a co-variation scheme");
      if (scheme.text != "linear-proportional") {
        Parser::fail(scheme, "unsupported co-variation '" + scheme.text + "'");
      }
    } else if (kw.text == "param") {
      const Token name = p.word("parameter name");
      const Token var_tok = p.word("variable name");
      const std::size_t var = lookup_var(net, var_tok);
      const Token at = p.expect("(");
      const auto key = word_list(p, ")");
      p.expect(")");
      const std::size_t row = row_for_key(net, var, at, key);
      const Token value = p.word("value label");
      specs.push_back({{var, row, lookup_value(net, var, value)}, name.text, std::nullopt});
    } else if (kw.text == "interval") {
      const Token name = p.word("parameter name");
      const double lo = to_double(number(p.word("lower bound")));
      const double hi = to_double(number(p.word("upper bound")));
      if (!(0.0 < lo && lo <= hi && hi < 1.0)) Parser::fail(name, "interval must satisfy 0 < lo <= hi < 1");
      intervals[name.text] = {lo, hi};
    } else {
      Parser::fail(kw, "unknown directive '" + kw.text + "'");
    }
    if (!p.at_end()) Parser::fail(p.peek(), "trailing input");
  }
  for (const auto& [name, range] : intervals) {
    bool used = false;
    for (auto& s : specs) {
      if (s.name == name) {
        s.range = range;
        used = true;
      }
    }
    if (!used) throw Error(ErrorKind::UnboundParameter, "interval for undeclared parameter '" + name + "'");
  }
  return parametrize(bn, specs, delta);
}

Constraint parse_constraint(const std::string& text, const Network& net) {
  Parser p(text);
  Constraint c;
  const Token head = p.word("'P'");
  if (head.text != "P" && head.text != "Pr") Parser::fail(head, "expected 'P('");
  p.expect("(");
  auto literals = [&](std::vector<Literal>& out) {
    do {
      const Token var_tok = p.word("variable name");
      const std::size_t var = lookup_var(net, var_tok);
      p.expect("=");
      const Token value = p.word("value label");
      out.push_back({var, lookup_value(net, var, value)});
    } while (p.accept("&"));
  };
  literals(c.hypothesis);
  if (p.accept("|")) literals(c.evidence);
  p.expect(")");
  const Token op = p.next();
  if (op.text == "<=") {
    c.direction = Direction::LessEq;
  } else if (op.text == ">=") {
    c.direction = Direction::GreaterEq;
  } else {
    Parser::fail(op, "expected '<=' or '>='");
  }
  const Token value = p.word("threshold");
  c.threshold = to_double(number(value));
  if (!p.at_end()) Parser::fail(p.peek(), "trailing input");
  check_constraint(net, c);
  return c;
}

std::vector<std::size_t> parse_order(const std::string& text, const Network& net) {
  Parser p(text);
  std::vector<std::size_t> order;
  for (const auto& t : word_list(p, "")) order.push_back(lookup_var(net, t));
  if (!p.at_end()) Parser::fail(p.peek(), "expected ','");
  return order;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pbntune
