#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <iterator>
#include <unordered_map>

#include "meadow/emit/lp.hpp"

namespace meadow::emit {

namespace {

enum class Tok { Name, Number, Plus, Minus, Colon, Op, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string_view text;
  std::size_t line = 0;
  bool bol = false;  ///< first token on its line
};

bool name_char(char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  switch (c) {
    case '_': case '.': case '!': case '"': case '#': case '$': case '%': case '&': case '(':
    case ')': case '/': case ',': case ';': case '?': case '@': case '\'': case '`': case '{':
    case '}': case '|': case '~': case '[': case ']': case '^':
      return true;
    default:
      return false;
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  const Token& peek(std::size_t k = 0) {
    while (ahead_.size() <= k) ahead_.push_back(scan());
    return ahead_[k];
  }
  Token next() {
    peek();
    Token t = ahead_.front();
    ahead_.pop_front();
    return t;
  }
  std::size_t line() { return peek().line; }

 private:
  Token scan() {
    bool bol = pos_ == 0 && !started_;
    started_ = true;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        bol = true;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\\') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    Token t;
    t.line = line_;
    t.bol = bol;
    if (pos_ >= s_.size()) return t;
    std::size_t start = pos_;
    char c = s_[pos_];
    if (c == ':') {
      t.kind = Tok::Colon;
      ++pos_;
    } else if (c == '+' || c == '-') {
      t.kind = c == '+' ? Tok::Plus : Tok::Minus;
      ++pos_;
    } else if (c == '<' || c == '>' || c == '=') {
      t.kind = Tok::Op;
      while (pos_ < s_.size() && (s_[pos_] == '<' || s_[pos_] == '>' || s_[pos_] == '=')) ++pos_;
    } else if ((c >= '0' && c <= '9') || c == '.') {
      t.kind = Tok::Number;
      while (pos_ < s_.size() && ((s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
          while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
        } else {
          pos_ = save;
        }
      }
    } else if (name_char(c)) {
      t.kind = Tok::Name;
      while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    } else {
      throw LpSyntaxError(line_, std::string("unexpected character '") + c + "'");
    }
    t.text = s_.substr(start, pos_ - start);
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  bool started_ = false;
  std::deque<Token> ahead_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

enum class Section { None, Objective, Constraints, Bounds, Generals, Binaries, End };

struct Column {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  double cost = 0.0;
  std::size_t bound_rank = SIZE_MAX;
};

struct RowData {
  std::string name;
  std::size_t begin = 0;
  Sign sign = Sign::Eq;
  double rhs = 0.0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  CanonicalModel run() {
    Section sec = Section::None;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Eof) break;
      if (auto s = section_at(); s) {
        sec = *s;
        if (sec == Section::End) break;
        continue;
      }
      switch (sec) {
        case Section::None:
          throw LpSyntaxError(t.line, "expected Minimize or Maximize");
        case Section::Objective:
          objective();
          break;
        case Section::Constraints:
          constraint();
          break;
        case Section::Bounds:
          bound();
          break;
        case Section::Generals:
        case Section::Binaries: {
          Token n = lex_.next();
          if (n.kind != Tok::Name) throw LpSyntaxError(n.line, "expected a column name");
          Column& c = cols_[column(n.text)];
          c.integer = true;
          if (sec == Section::Binaries) {
            c.lower = 0.0;
            c.upper = 1.0;
          }
          break;
        }
        case Section::End:
          break;
      }
    }
    if (sec != Section::End) throw LpSyntaxError(lex_.line(), "missing End");
    return build();
  }

 private:
  // Section keyword starting the current line, with its token count.
  std::optional<std::pair<Section, int>> keyword() {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Name || !t.bol) return std::nullopt;
    // A label such as `st:` is a row name, not a keyword.
    if (lex_.peek(1).kind == Tok::Colon) return std::nullopt;
    std::string w = lower(t.text);
    if (w == "minimize" || w == "minimise" || w == "minimum" || w == "min" || w == "maximize" ||
        w == "maximise" || w == "maximum" || w == "max") {
      return std::pair{Section::Objective, 1};
    }
    if (w == "st" || w == "s.t." || w == "st.") return std::pair{Section::Constraints, 1};
    if (w == "subject" || w == "such") {
      const Token& n = lex_.peek(1);
      if (n.kind == Tok::Name && n.line == t.line &&
          lower(n.text) == (w == "subject" ? "to" : "that")) {
        return std::pair{Section::Constraints, 2};
      }
      return std::nullopt;
    }
    if (w == "bounds" || w == "bound") return std::pair{Section::Bounds, 1};
    if (w == "generals" || w == "general" || w == "gen" || w == "integers") {
      return std::pair{Section::Generals, 1};
    }
    if (w == "binaries" || w == "binary" || w == "bin") return std::pair{Section::Binaries, 1};
    if (w == "end") return std::pair{Section::End, 1};
    return std::nullopt;
  }

  bool at_section() { return keyword().has_value(); }

  std::optional<Section> section_at() {
    auto k = keyword();
    if (!k) return std::nullopt;
    if (k->first == Section::Objective) maximize_ = lower(lex_.peek().text).rfind("max", 0) == 0;
    for (int n = 0; n < k->second; ++n) lex_.next();
    return k->first;
  }

  std::size_t column(std::string_view name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    cols_.push_back({});
    cols_.back().name.assign(name);
    std::size_t id = cols_.size() - 1;
    index_.emplace(cols_.back().name, id);
    return id;
  }

  double number(const Token& t) {
    auto v = parse_double(t.text);
    if (!v) throw LpSyntaxError(t.line, "bad number '" + std::string(t.text) + "'");
    return *v;
  }

  bool is_infinity(const Token& t) {
    if (t.kind != Tok::Name) return false;
    std::string w = lower(t.text);
    return w == "inf" || w == "infinity";
  }

  // Linear expression up to an operator or the next section. Constant terms
  // are summed into `constant`.
  template <typename OnTerm>
  void linear(OnTerm&& on_term, double& constant) {
    bool any = false;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Eof || t.kind == Tok::Op || at_section()) break;
      if (any && t.kind == Tok::Name && lex_.peek(1).kind == Tok::Colon) break;
      bool neg = false;
      bool signed_term = false;
      while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
        neg ^= lex_.next().kind == Tok::Minus;
        signed_term = true;
      }
      if (any && !signed_term) throw LpSyntaxError(t.line, "expected + or - between terms");
      Token u = lex_.next();
      double coef = 1.0;
      if (u.kind == Tok::Number) {
        coef = number(u);
        const Token& n = lex_.peek();
        if (n.kind != Tok::Name || (n.bol && at_section()) || is_infinity(n) ||
            lex_.peek(1).kind == Tok::Colon) {
          constant += neg ? -coef : coef;
          any = true;
          continue;
        }
        u = lex_.next();
      }
      if (u.kind != Tok::Name) throw LpSyntaxError(u.line, "expected a term");
      on_term(column(u.text), neg ? -coef : coef);
      any = true;
    }
  }

  void objective() {
    if (lex_.peek().kind == Tok::Name && lex_.peek(1).kind == Tok::Colon) {
      lex_.next();
      lex_.next();
    }
    double constant = 0.0;
    linear([&](std::size_t c, double v) { cols_[c].cost += maximize_ ? -v : v; }, constant);
    if (lex_.peek().kind == Tok::Op) throw LpSyntaxError(lex_.line(), "operator in objective");
  }

  static std::optional<Sign> sign_of(std::string_view op) {
    if (op == "<=" || op == "<") return Sign::Le;
    if (op == ">=" || op == ">") return Sign::Ge;
    if (op == "=" || op == "==") return Sign::Eq;
    return std::nullopt;
  }

  double signed_value() {
    bool neg = false;
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      neg ^= lex_.next().kind == Tok::Minus;
    }
    Token t = lex_.next();
    double v;
    if (t.kind == Tok::Number) {
      v = number(t);
    } else if (is_infinity(t)) {
      v = kInf;
    } else {
      throw LpSyntaxError(t.line, "expected a number");
    }
    return neg ? -v : v;
  }

  void constraint() {
    RowData row;
    if (lex_.peek().kind == Tok::Name && lex_.peek(1).kind == Tok::Colon) {
      row.name.assign(lex_.next().text);
      lex_.next();
    }
    row.begin = entry_col_.size();
    double constant = 0.0;
    linear(
        [&](std::size_t c, double v) {
          entry_col_.push_back(c);
          entry_val_.push_back(v);
        },
        constant);
    Token op = lex_.next();
    if (op.kind != Tok::Op) throw LpSyntaxError(op.line, "expected <=, >= or =");
    auto sign = sign_of(op.text);
    if (!sign) throw LpSyntaxError(op.line, "malformed sign '" + std::string(op.text) + "'");
    row.sign = *sign;
    row.rhs = signed_value();
    if (constant != 0.0) row.rhs -= constant;
    rows_.push_back(std::move(row));
  }

  void bound() {
    std::size_t line = lex_.peek().line;
    std::vector<Token> toks;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Eof || t.line != line) break;
      toks.push_back(lex_.next());
    }
    // Values are collapsed to (sign, number|inf) pairs; names stay.
    struct Item {
      enum { Name, Value, Op } kind;
      std::string_view text;
      double value = 0.0;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      const Token& t = toks[k];
      if (t.kind == Tok::Op) {
        items.push_back({Item::Op, t.text});
      } else if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
        bool neg = t.kind == Tok::Minus;
        if (k + 1 >= toks.size()) throw LpSyntaxError(line, "dangling sign in bound");
        const Token& n = toks[++k];
        double v;
        if (n.kind == Tok::Number) v = number(n);
        else if (is_infinity(n)) v = kInf;
        else throw LpSyntaxError(line, "expected a number after sign");
        items.push_back({Item::Value, n.text, neg ? -v : v});
      } else if (t.kind == Tok::Number) {
        items.push_back({Item::Value, t.text, number(t)});
      } else if (t.kind == Tok::Name) {
        items.push_back({Item::Name, t.text});
      } else {
        throw LpSyntaxError(line, "unexpected token in bound");
      }
    }
    auto value = [&](const Item& it) {
      if (it.kind == Item::Value) return it.value;
      if (it.kind == Item::Name && (lower(it.text) == "inf" || lower(it.text) == "infinity")) {
        return kInf;
      }
      throw LpSyntaxError(line, "expected a bound value");
    };
    auto op = [&](const Item& it) {
      if (it.kind != Item::Op) throw LpSyntaxError(line, "expected a comparison");
      auto s = sign_of(it.text);
      if (!s) throw LpSyntaxError(line, "malformed sign '" + std::string(it.text) + "'");
      return *s;
    };
    auto col = [&](const Item& it) -> Column& {
      if (it.kind != Item::Name) throw LpSyntaxError(line, "expected a column name");
      std::size_t id = column(it.text);
      if (cols_[id].bound_rank == SIZE_MAX) cols_[id].bound_rank = bound_rank_++;
      return cols_[id];
    };
    auto apply = [&](Column& c, Sign s, double v, bool var_left) {
      if (s == Sign::Eq) {
        c.lower = c.upper = v;
      } else if ((s == Sign::Le) == var_left) {
        c.upper = v;
      } else {
        c.lower = v;
      }
    };

    if (items.size() == 2 && items[1].kind == Item::Name && lower(items[1].text) == "free") {
      Column& c = col(items[0]);
      c.lower = -kInf;
      c.upper = kInf;
    } else if (items.size() == 3 && items[0].kind == Item::Name) {
      Column& c = col(items[0]);
      apply(c, op(items[1]), value(items[2]), true);
    } else if (items.size() == 3) {
      Column& c = col(items[2]);
      apply(c, op(items[1]), value(items[0]), false);
    } else if (items.size() == 5) {
      Column& c = col(items[2]);
      apply(c, op(items[1]), value(items[0]), false);
      apply(c, op(items[3]), value(items[4]), true);
    } else {
      throw LpSyntaxError(line, "unrecognized bound");
    }
  }

  CanonicalModel build() {
    std::vector<std::size_t> order(cols_.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cols_[a].bound_rank < cols_[b].bound_rank;
    });
    std::vector<std::size_t> final_id(cols_.size());
    CanonicalModel m;
    std::string family;
    std::vector<Index> idx;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Column& c = cols_[order[k]];
      final_id[order[k]] = k;
      parse_column_name(c.name, family, idx);
      m.add_column(family, idx, c.lower, c.upper, c.integer, c.cost);
    }
    std::vector<Entry> entries;
    std::size_t block;
    std::vector<Index> global;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      std::size_t end = r + 1 < rows_.size() ? rows_[r + 1].begin : entry_col_.size();
      entries.clear();
      for (std::size_t e = rows_[r].begin; e < end; ++e) {
        entries.push_back({final_id[entry_col_[e]], entry_val_[e]});
      }
      std::stable_sort(entries.begin(), entries.end(),
                       [](const Entry& a, const Entry& b) { return a.col < b.col; });
      std::size_t out = 0;
      for (std::size_t k = 0; k < entries.size();) {
        Entry e = entries[k++];
        while (k < entries.size() && entries[k].col == e.col) e.value += entries[k++].value;
        if (e.value != 0.0) entries[out++] = e;
      }
      entries.resize(out);
      if (!parse_row_name(rows_[r].name, block, global)) {
        block = 0;
        global = {static_cast<Index>(r)};
      }
      m.add_row(entries, rows_[r].sign, rows_[r].rhs, block, global);
    }
    return m;
  }

  Lexer lex_;
  bool maximize_ = false;
  std::deque<Column> cols_;
  std::unordered_map<std::string_view, std::size_t> index_;
  std::size_t bound_rank_ = 0;
  std::vector<RowData> rows_;
  std::vector<std::size_t> entry_col_;
  std::vector<double> entry_val_;
};

}  // namespace

CanonicalModel read_lp_string(std::string_view text) { return Parser(text).run(); }

CanonicalModel read_lp(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::ios_base::failure("read from LP source failed");
  return read_lp_string(text);
}

}  // namespace meadow::emit
