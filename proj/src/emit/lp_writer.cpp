#include <cmath>
#include <ios>
#include <ostream>
#include <sstream>

#include "meadow/emit/lp.hpp"

namespace meadow::emit {

namespace {

class Sink {
 public:
  explicit Sink(std::ostream& out) : out_(out) { buf_.reserve(kChunk + 4096); }

  std::string& buf() { return buf_; }
  void maybe_flush() {
    if (buf_.size() >= kChunk) flush();
  }
  void flush() {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
    if (!out_) throw std::ios_base::failure("write to LP sink failed");
  }

 private:
  static constexpr std::size_t kChunk = 1 << 20;
  std::ostream& out_;
  std::string buf_;
};

// Appends ` + 3 x_1` style terms, starting a continuation line past `wrap`.
struct LineWriter {
  std::string& out;
  std::size_t wrap;
  std::size_t line_start;
  bool first = true;

  void term(double v, const std::string& name) {
    bool neg = std::signbit(v);
    double mag = neg ? -v : v;
    std::string piece = neg ? " -" : (first ? "" : " +");
    if (mag != 1.0) piece += " " + format_double(mag);
    piece += ' ';
    piece += name;
    if (!first && out.size() - line_start + piece.size() > wrap) {
      out += "\n ";
      line_start = out.size() - 1;
    }
    out += piece;
    first = false;
  }
};

}  // namespace

void write_lp(const CanonicalModel& m, std::ostream& os, const LpWriteOptions& opts) {
  Sink sink(os);
  std::string& out = sink.buf();
  std::vector<std::string> names(m.num_cols());
  for (std::size_t c = 0; c < m.num_cols(); ++c) names[c] = column_name(m, c);

  out += "\\ meadow canonical model\nMinimize\n obj:";
  {
    LineWriter w{out, opts.wrap, out.size() - 5};
    for (std::size_t c = 0; c < m.num_cols(); ++c) {
      if (m.cost(c) != 0.0) w.term(m.cost(c), names[c]);
    }
    out += '\n';
  }
  out += "Subject To\n";
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    std::size_t start = out.size();
    out += ' ';
    out += row_name(m, r);
    out += ':';
    LineWriter w{out, opts.wrap, start};
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) w.term(vals[k], names[cols[k]]);
    if (cols.empty()) out += m.num_cols() ? " 0 " + names[0] : " 0";
    out += ' ';
    out += to_string(m.sign(r));
    out += ' ';
    out += format_double(m.rhs(r));
    out += '\n';
    sink.maybe_flush();
  }
  out += "Bounds\n";
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    double lo = m.lower(c), up = m.upper(c);
    out += ' ';
    if (lo == -kInf && up == kInf) {
      out += names[c] + " free";
    } else if (lo == up && std::signbit(lo) == std::signbit(up)) {
      out += names[c] + " = " + format_double(lo);
    } else if (up == kInf) {
      out += names[c] + " >= " + format_double(lo);
    } else {
      out += format_double(lo) + " <= " + names[c] + " <= " + format_double(up);
    }
    out += '\n';
    sink.maybe_flush();
  }
  bool any_int = false;
  std::size_t line = 0;
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    if (!m.is_integer(c)) continue;
    if (!any_int) {
      out += "Generals\n";
      any_int = true;
    }
    if (line + names[c].size() + 1 > opts.wrap) {
      out += '\n';
      line = 0;
    }
    out += ' ';
    out += names[c];
    line += names[c].size() + 1;
    sink.maybe_flush();
  }
  if (any_int) out += '\n';
  out += "End\n";
  sink.flush();
  os.flush();
  if (!os) throw std::ios_base::failure("write to LP sink failed");
}

std::string write_lp_string(const CanonicalModel& m, const LpWriteOptions& opts) {
  std::ostringstream os;
  write_lp(m, os, opts);
  return std::move(os).str();
}

}  // namespace meadow::emit
