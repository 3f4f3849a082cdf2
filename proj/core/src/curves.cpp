#include "trustcal/curves.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::experiment {

using nlohmann::json;

namespace {

constexpr std::string_view kCsvHeader = "condition,round,integrated,total,percentage";

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
T number(std::string_view field, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError("curve csv line " + std::to_string(line) + ": bad number '" +
                      std::string(field) + "'");
  }
  return value;
}

TrustCurve& curve_named(std::vector<TrustCurve>& curves, const std::string& name) {
  for (TrustCurve& c : curves) {
    if (c.condition == name) return c;
  }
  curves.push_back({name, {}});
  return curves.back();
}

}  // namespace

CurveFormat parse_curve_format(std::string_view text) {
  if (text == "csv") return CurveFormat::Csv;
  if (text == "json") return CurveFormat::Json;
  throw UsageError("unknown curve format '" + std::string(text) + "' (expected csv or json)");
}

std::string export_curves(std::span<const TrustCurve> curves, CurveFormat format) {
  if (curves.empty()) throw DomainError("no curves to export");
  if (format == CurveFormat::Json) {
    json rows = json::array();
    for (const TrustCurve& c : curves) {
      for (const CurvePoint& p : c.points) {
        rows.push_back({{"condition", c.condition},
                        {"round", p.round_number},
                        {"integrated", p.integrated},
                        {"total", p.total},
                        {"percentage", p.percentage}});
      }
    }
    return json{{"columns", {"condition", "round", "integrated", "total", "percentage"}},
                {"rows", rows}}
        .dump(2);
  }
  std::string out(kCsvHeader);
  out += '\n';
  for (const TrustCurve& c : curves) {
    if (c.condition.find_first_of(",\n\"") != std::string::npos) {
      throw DomainError("condition name not representable in csv: " + c.condition);
    }
    for (const CurvePoint& p : c.points) {
      out += c.condition + ',' + std::to_string(p.round_number) + ',' +
             std::to_string(p.integrated) + ',' + std::to_string(p.total) + ',' +
             shortest(p.percentage) + '\n';
    }
  }
  return out;
}

std::vector<TrustCurve> import_curves(std::string_view text, CurveFormat format) {
  std::vector<TrustCurve> curves;
  if (format == CurveFormat::Json) {
    try {
      json doc = json::parse(text);
      for (const json& row : doc.at("rows")) {
        curve_named(curves, row.at("condition").get<std::string>())
            .points.push_back({row.at("round").get<int>(), row.at("integrated").get<int>(),
                               row.at("total").get<int>(), row.at("percentage").get<double>()});
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed curve json: ") + e.what());
    }
    return curves;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ConfigError("unexpected curve csv header: " + line);
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 5) {
      throw ConfigError("curve csv line " + std::to_string(line_no) + ": expected 5 columns");
    }
    curve_named(curves, std::string(fields[0]))
        .points.push_back({number<int>(fields[1], line_no), number<int>(fields[2], line_no),
                           number<int>(fields[3], line_no), number<double>(fields[4], line_no)});
  }
  return curves;
}

}  // namespace trustcal::experiment
