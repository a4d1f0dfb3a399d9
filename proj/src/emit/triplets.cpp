#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "meadow/core/errors.hpp"
#include "meadow/emit/lp.hpp"

namespace meadow::emit {

namespace {

using nlohmann::ordered_json;

// JSON has no infinities; non-finite values travel as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto v = parse_double(j.get<std::string>())) return *v;
  }
  throw DataError("triplet sidecar: bad number " + j.dump());
}

Sign parse_sign(const std::string& s) {
  if (s == "=") return Sign::Eq;
  if (s == "<=") return Sign::Le;
  if (s == ">=") return Sign::Ge;
  throw DataError("triplet sidecar: bad sign '" + s + "'");
}

}  // namespace

void write_triplets(const CanonicalModel& m, std::ostream& csv, std::ostream& sidecar) {
  std::string buf = "row,col,val\n";
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      buf += std::to_string(r);
      buf += ',';
      buf += std::to_string(cols[k]);
      buf += ',';
      buf += format_double(vals[k]);
      buf += '\n';
    }
    if (buf.size() > (1u << 20)) {
      csv.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  csv.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  csv.flush();
  if (!csv) throw std::ios_base::failure("write to triplet CSV failed");

  ordered_json doc;
  doc["format"] = "meadow-triplets";
  doc["version"] = 1;
  ordered_json cols = ordered_json::array();
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    cols.push_back({{"name", column_name(m, c)},
                    {"lower", number(m.lower(c))},
                    {"upper", number(m.upper(c))},
                    {"integer", m.is_integer(c)},
                    {"cost", number(m.cost(c))}});
  }
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    rows.push_back({{"name", row_name(m, r)}, {"sign", to_string(m.sign(r))}, {"rhs", number(m.rhs(r))}});
  }
  doc["columns"] = std::move(cols);
  doc["rows"] = std::move(rows);
  sidecar << doc.dump(1) << '\n';
  sidecar.flush();
  if (!sidecar) throw std::ios_base::failure("write to triplet sidecar failed");
}

CanonicalModel read_triplets(std::istream& csv, std::istream& sidecar) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(sidecar);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("triplet sidecar: ") + e.what());
  }
  if (!doc.contains("columns") || !doc.contains("rows")) {
    throw DataError("triplet sidecar: missing columns or rows");
  }
  CanonicalModel m;
  std::string family;
  std::vector<Index> idx;
  for (const auto& c : doc["columns"]) {
    parse_column_name(c.at("name").get<std::string>(), family, idx);
    m.add_column(family, idx, number(c.at("lower")), number(c.at("upper")),
                 c.value("integer", false), number(c.at("cost")));
  }
  const auto& rows = doc["rows"];
  std::vector<std::vector<Entry>> entries(rows.size());

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(csv, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("row", 0) == 0) continue;
    if (line.empty()) continue;
    std::size_t a = line.find(','), b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw DataError("triplet CSV line " + std::to_string(lineno) + ": expected row,col,val");
    }
    std::size_t r = std::stoull(line.substr(0, a));
    std::size_t c = std::stoull(line.substr(a + 1, b - a - 1));
    auto v = parse_double(std::string_view(line).substr(b + 1));
    if (!v || r >= rows.size() || c >= m.num_cols()) {
      throw DataError("triplet CSV line " + std::to_string(lineno) + ": bad entry");
    }
    entries[r].push_back({c, *v});
  }
  std::size_t block;
  std::vector<Index> global;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!parse_row_name(rows[r].at("name").get<std::string>(), block, global)) {
      block = 0;
      global = {static_cast<Index>(r)};
    }
    m.add_row(entries[r], parse_sign(rows[r].at("sign").get<std::string>()),
              number(rows[r].at("rhs")), block, global);
  }
  return m;
}

}  // namespace meadow::emit
