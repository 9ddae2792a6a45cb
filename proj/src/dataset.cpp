#include "metaglyph/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

#include "metaglyph/error.hpp"
#include "metaglyph/semantics.hpp"

namespace metaglyph {

namespace {

constexpr double kParseRate = 0.95;

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// days_from_civil, proleptic Gregorian.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool valid_date(int y, int m, int d) {
  if (y < 1 || y > 9999 || m < 1 || m > 12 || d < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return d <= kDays[m - 1] + (m == 2 && leap ? 1 : 0);
}

// Reads exactly `width` digits.
bool read_fixed(std::string_view s, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  pos += width;
  return true;
}

// Reads 1 or 2 digits.
bool read_small(std::string_view s, std::size_t& pos, int& out) {
  if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) return false;
  int v = s[pos++] - '0';
  if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) v = v * 10 + (s[pos++] - '0');
  out = v;
  return true;
}

std::optional<double> parse_time_suffix(std::string_view s, std::size_t pos) {
  if (pos == s.size()) return 0.0;
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  int hh = 0, mm = 0, ss = 0;
  if (!read_fixed(s, pos, 2, hh) || pos >= s.size() || s[pos++] != ':' || !read_fixed(s, pos, 2, mm))
    return std::nullopt;
  double frac = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_fixed(s, pos, 2, ss)) return std::nullopt;
    if (pos < s.size() && s[pos] == '.') {
      std::size_t start = pos++;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      frac = std::stod(std::string(s.substr(start, pos - start)));
    }
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size() || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  return (hh * 3600.0 + mm * 60.0 + ss + frac) / 86400.0;
}

DataDimension make_dimension(std::string name, std::vector<std::string> raw, DataType type) {
  DataDimension dim;
  dim.name = std::move(name);
  dim.type = type;
  dim.raw = std::move(raw);
  if (type != DataType::Numerical && type != DataType::Temporal) return dim;

  const std::size_t n = dim.raw.size();
  std::vector<std::optional<double>> parsed(n);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    parsed[i] = type == DataType::Numerical ? parse_number(dim.raw[i]) : parse_temporal(dim.raw[i]);
    if (parsed[i]) {
      sum += *parsed[i];
      ++count;
    }
  }
  const double mean = count ? sum / static_cast<double>(count) : 0.0;
  dim.numeric.resize(n);
  dim.imputed.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    dim.imputed[i] = !parsed[i].has_value();
    dim.numeric[i] = parsed[i].value_or(mean);
  }
  return dim;
}

char detect_delimiter(std::string_view bytes) {
  std::size_t comma = 0, tab = 0, semi = 0;
  bool quoted = false;
  for (char c : bytes) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '\n' || c == '\r') break;
    comma += c == ',';
    tab += c == '\t';
    semi += c == ';';
  }
  if (tab > comma && tab >= semi) return '\t';
  if (semi > comma && semi > tab) return ';';
  return ',';
}

std::vector<std::vector<std::string>> split_records(std::string_view bytes, char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && trim_view(row.front()).empty();
    if (!blank) records.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = bytes[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (!field.empty() || !row.empty() || field_started) end_row();
  return records;
}

}  // namespace

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::Numerical: return "numerical";
    case DataType::Categorical: return "categorical";
    case DataType::Temporal: return "temporal";
    case DataType::Geospatial: return "geospatial";
  }
  return "categorical";
}

DataType data_type_from_string(std::string_view s) {
  if (s == "numerical") return DataType::Numerical;
  if (s == "temporal") return DataType::Temporal;
  if (s == "geospatial") return DataType::Geospatial;
  if (s == "categorical") return DataType::Categorical;
  throw Error(ErrorCode::InvalidRequest, "unknown data type '" + std::string(s) + "'");
}

bool DataDimension::non_negative() const {
  return has_numeric() && std::all_of(numeric.begin(), numeric.end(), [](double v) { return v >= 0; });
}

std::pair<double, double> DataDimension::range() const {
  if (numeric.empty()) return {0.0, 0.0};
  auto [lo, hi] = std::minmax_element(numeric.begin(), numeric.end());
  return {*lo, *hi};
}

bool is_missing(std::string_view cell) {
  const auto t = trim_view(cell);
  if (t.empty()) return true;
  std::string lower;
  for (char c : t) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "na" || lower == "n/a" || lower == "null";
}

std::optional<double> parse_number(std::string_view cell) {
  auto t = trim_view(cell);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_temporal(std::string_view cell) {
  const auto s = trim_view(cell);
  if (s.size() < 7) return std::nullopt;
  std::size_t pos = 0;
  int y = 0, m = 0, d = 1;
  if (std::isdigit(static_cast<unsigned char>(s[0])) && read_fixed(s, pos, 4, y) && pos < s.size() &&
      (s[pos] == '-' || s[pos] == '/')) {
    // YYYY-MM-DD[(T| )HH:MM[:SS]], YYYY/MM/DD, YYYY-MM
    const char sep = s[pos++];
    if (!read_fixed(s, pos, 2, m)) return std::nullopt;
    if (pos == s.size()) {
      if (sep != '-' || !valid_date(y, m, 1)) return std::nullopt;
      return static_cast<double>(days_from_civil(y, static_cast<unsigned>(m), 1));
    }
    if (s[pos++] != sep || !read_fixed(s, pos, 2, d)) return std::nullopt;
    if (!valid_date(y, m, d)) return std::nullopt;
    auto tod = parse_time_suffix(s, pos);
    if (!tod) return std::nullopt;
    return static_cast<double>(days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d))) + *tod;
  }
  // MM/DD/YYYY
  pos = 0;
  if (read_small(s, pos, m) && pos < s.size() && s[pos++] == '/' && read_small(s, pos, d) && pos < s.size() &&
      s[pos++] == '/' && read_fixed(s, pos, 4, y) && valid_date(y, m, d)) {
    auto tod = parse_time_suffix(s, pos);
    if (!tod) return std::nullopt;
    return static_cast<double>(days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d))) + *tod;
  }
  return std::nullopt;
}

DataType infer_dimension_type(std::span<const std::string> values, const RegionTable& regions) {
  std::size_t present = 0, temporal = 0, geo = 0, numeric = 0;
  for (const auto& v : values) {
    if (is_missing(v)) continue;
    ++present;
    temporal += parse_temporal(v).has_value();
    geo += regions.contains(trim_view(v));
    numeric += parse_number(v).has_value();
  }
  if (present == 0) throw Error(ErrorCode::AllEmpty, "every cell in the column is blank");
  const double need = kParseRate * static_cast<double>(present);
  if (static_cast<double>(temporal) >= need) return DataType::Temporal;
  if (static_cast<double>(geo) >= need) return DataType::Geospatial;
  if (static_cast<double>(numeric) >= need) return DataType::Numerical;
  return DataType::Categorical;
}

std::string topic_from_name(std::string_view name) {
  if (auto slash = name.find_last_of("/\\"); slash != std::string_view::npos) name.remove_prefix(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string_view::npos && dot > 0) name = name.substr(0, dot);
  std::string out;
  bool space = false;
  for (char c : name) {
    if (c == '_' || c == '-' || c == '.' || std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

Dataset::Dataset(std::string topic, std::vector<DataDimension> dims, std::vector<DataGroup> groups)
    : topic_(std::move(topic)), dims_(std::move(dims)), groups_(std::move(groups)) {
  rows_ = dims_.empty() ? 0 : dims_.front().raw.size();
  validate();
}

void Dataset::validate() const {
  if (topic_.empty()) throw Error(ErrorCode::InvalidRequest, "dataset topic must be non-empty");
  for (const auto& d : dims_)
    if (d.raw.size() != rows_)
      throw Error(ErrorCode::RaggedRows, "dimension '" + d.name + "' has a different row count");
  std::vector<int> owner(dims_.size(), -1);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& grp = groups_[g];
    if (grp.members.size() < 2)
      throw Error(ErrorCode::InvalidGroup, "group '" + grp.name + "' needs at least two members");
    for (auto m : grp.members) {
      if (m >= dims_.size()) throw Error(ErrorCode::InvalidGroup, "group '" + grp.name + "' references a missing column");
      if (dims_[m].type != DataType::Numerical)
        throw Error(ErrorCode::InvalidGroup, "group member '" + dims_[m].name + "' is not numerical");
      if (owner[m] != -1)
        throw Error(ErrorCode::InvalidGroup, "dimension '" + dims_[m].name + "' belongs to two groups");
      owner[m] = static_cast<int>(g);
    }
  }
}

std::optional<std::size_t> Dataset::group_of(std::size_t i) const {
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (std::find(groups_[g].members.begin(), groups_[g].members.end(), i) != groups_[g].members.end()) return g;
  return std::nullopt;
}

std::vector<std::size_t> Dataset::ungrouped() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (!group_of(i)) out.push_back(i);
  return out;
}

Dataset Dataset::with_groups(std::vector<DataGroup> groups) const {
  Dataset copy = *this;
  copy.groups_ = std::move(groups);
  copy.validate();
  return copy;
}

Dataset Dataset::with_importance(std::span<const double> dimension_scores, std::span<const double> group_scores) const {
  Dataset copy = *this;
  for (std::size_t i = 0; i < copy.dims_.size() && i < dimension_scores.size(); ++i)
    copy.dims_[i].importance = dimension_scores[i];
  for (std::size_t g = 0; g < copy.groups_.size(); ++g) {
    if (g < group_scores.size()) {
      copy.groups_[g].importance = group_scores[g];
      continue;
    }
    double sum = 0.0;
    for (auto m : copy.groups_[g].members) sum += copy.dims_[m].importance.value_or(0.0);
    copy.groups_[g].importance = sum / static_cast<double>(copy.groups_[g].members.size());
  }
  return copy;
}

Dataset load_spreadsheet(std::string_view bytes, std::string_view name, const RegionTable& regions) {
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xEF &&
      static_cast<unsigned char>(bytes[1]) == 0xBB && static_cast<unsigned char>(bytes[2]) == 0xBF)
    bytes.remove_prefix(3);
  if (trim_view(bytes).empty()) throw Error(ErrorCode::EmptyFile, "the spreadsheet is empty");

  const char delim = detect_delimiter(bytes);
  auto records = split_records(bytes, delim);
  if (records.empty()) throw Error(ErrorCode::EmptyFile, "the spreadsheet has no header row");
  const auto& header = records.front();
  if (records.size() == 1) throw Error(ErrorCode::ZeroRows, "the spreadsheet has a header but no rows");

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw Error(ErrorCode::RaggedRows, "row length does not match the header",
                  "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
  }

  std::vector<DataDimension> dims;
  dims.reserve(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::vector<std::string> cells;
    cells.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) cells.push_back(records[r][c]);
    std::string col_name{trim_view(header[c])};
    if (col_name.empty()) col_name = "column " + std::to_string(c + 1);
    DataType type;
    try {
      type = infer_dimension_type(cells, regions);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllEmpty) throw;
      type = DataType::Categorical;  // a blank column carries no signal, keep it as-is
    }
    dims.push_back(make_dimension(std::move(col_name), std::move(cells), type));
  }

  std::string topic = topic_from_name(name);
  if (topic.empty()) topic = std::string(name);
  if (topic.empty()) throw Error(ErrorCode::InvalidRequest, "spreadsheet name must be non-empty");
  return Dataset(std::move(topic), std::move(dims));
}

std::vector<DataGroup> propose_groups(const Dataset& ds, semantics::TextEmbeddingBackend& backend,
                                      double similarity_threshold) {
  std::vector<std::size_t> numeric;
  for (std::size_t i = 0; i < ds.dimensions().size(); ++i)
    if (ds.dimension(i).type == DataType::Numerical) numeric.push_back(i);
  const std::size_t n = numeric.size();
  if (n < 2) return {};

  std::vector<semantics::Vector> emb;
  emb.reserve(n);
  for (auto i : numeric) emb.push_back(backend.embed(ds.dimension(i).name));
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      adj[a][b] = adj[b][a] = semantics::cosine(emb[a], emb[b]) >= similarity_threshold;

  // Bron–Kerbosch without pivoting; column counts are small.
  std::vector<std::vector<std::size_t>> cliques;
  std::function<void(std::vector<std::size_t>, std::vector<std::size_t>, std::vector<std::size_t>)> expand =
      [&](std::vector<std::size_t> r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
        if (p.empty() && x.empty()) {
          if (r.size() >= 2) cliques.push_back(r);
          return;
        }
        while (!p.empty()) {
          const std::size_t v = p.front();
          std::vector<std::size_t> r2 = r, p2, x2;
          r2.push_back(v);
          for (auto u : p)
            if (adj[v][u]) p2.push_back(u);
          for (auto u : x)
            if (adj[v][u]) x2.push_back(u);
          expand(r2, p2, x2);
          p.erase(p.begin());
          x.push_back(v);
        }
      };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  expand({}, all, {});

  std::vector<DataGroup> out;
  for (auto& c : cliques) {
    std::sort(c.begin(), c.end());
    DataGroup g;
    for (auto k : c) g.members.push_back(numeric[k]);
    for (std::size_t k = 0; k < g.members.size(); ++k)
      g.name += (k ? " + " : "") + ds.dimension(g.members[k]).name;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const DataGroup& a, const DataGroup& b) { return a.members < b.members; });
  return out;
}

std::string to_csv(const Dataset& ds) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos && (s.empty() || (!std::isspace(static_cast<unsigned char>(s.front())) && !std::isspace(static_cast<unsigned char>(s.back())))))
      return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out;
  const auto& dims = ds.dimensions();
  for (std::size_t c = 0; c < dims.size(); ++c) out += (c ? "," : "") + quote(dims[c].name);
  out += "\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < dims.size(); ++c) out += (c ? "," : "") + quote(dims[c].raw[r]);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Dataset& ds) {
  nlohmann::json j;
  j["topic"] = ds.topic();
  j["rows"] = ds.rows();
  auto& dims = j["dimensions"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.dimensions().size(); ++i) {
    const auto& d = ds.dimension(i);
    nlohmann::json jd{{"id", "d" + std::to_string(i)}, {"name", d.name}, {"type", to_string(d.type)}, {"values", d.raw}};
    jd["importance"] = d.importance ? nlohmann::json(*d.importance) : nlohmann::json(nullptr);
    std::size_t imputed = 0;
    for (bool b : d.imputed) imputed += b;
    jd["imputed"] = imputed;
    dims.push_back(std::move(jd));
  }
  auto& groups = j["groups"] = nlohmann::json::array();
  for (std::size_t g = 0; g < ds.groups().size(); ++g) {
    const auto& grp = ds.groups()[g];
    nlohmann::json jg{{"id", "g" + std::to_string(g)}, {"name", grp.name}, {"members", grp.members}};
    jg["importance"] = grp.importance ? nlohmann::json(*grp.importance) : nlohmann::json(nullptr);
    groups.push_back(std::move(jg));
  }
  return j;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  try {
    std::vector<DataDimension> dims;
    for (const auto& jd : j.at("dimensions")) {
      auto dim = make_dimension(jd.at("name").get<std::string>(), jd.at("values").get<std::vector<std::string>>(),
                                data_type_from_string(jd.at("type").get<std::string>()));
      if (jd.contains("importance") && !jd["importance"].is_null()) dim.importance = jd["importance"].get<double>();
      dims.push_back(std::move(dim));
    }
    std::vector<DataGroup> groups;
    if (j.contains("groups")) {
      for (const auto& jg : j["groups"]) {
        DataGroup g{jg.at("name").get<std::string>(), jg.at("members").get<std::vector<std::size_t>>(), std::nullopt};
        if (jg.contains("importance") && !jg["importance"].is_null()) g.importance = jg["importance"].get<double>();
        groups.push_back(std::move(g));
      }
    }
    return Dataset(j.at("topic").get<std::string>(), std::move(dims), std::move(groups));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRequest, std::string("malformed dataset JSON: ") + e.what());
  }
}

}  // namespace metaglyph
