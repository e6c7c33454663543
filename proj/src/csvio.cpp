#include "tpx/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tpx/error.hpp"

namespace tpx {

const char* const kRDCsvHeader =
    "profile_id,config,sequence,qp,rate_kbps,psnr_y,psnr_u,psnr_v,vmaf,energy_j,time_s";

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + text + "'");
  }
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace

std::vector<RDRow> read_rd_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(source_name + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRDCsvHeader)
    throw ConfigError(source_name + ": CSV header mismatch; expected '" +
                      std::string(kRDCsvHeader) + "'");

  std::vector<RDRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 11)
      throw ConfigError(where + ": expected 11 fields, got " + std::to_string(f.size()));
    RDRow row;
    row.profile_id = f[0];
    row.config = parse_config(f[1]);
    row.sequence = f[2];
    row.point.qp = static_cast<int>(parse_number(f[3], where));
    row.point.rate_kbps = parse_number(f[4], where);
    row.point.psnr_y = parse_number(f[5], where);
    row.point.psnr_u = parse_number(f[6], where);
    row.point.psnr_v = parse_number(f[7], where);
    row.point.vmaf = parse_number(f[8], where);
    if (!f[9].empty()) row.point.energy_j = parse_number(f[9], where);
    if (!f[10].empty()) row.point.time_s = parse_number(f[10], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RDRow> read_rd_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
  return read_rd_csv(in, path);
}

void write_rd_csv(std::ostream& out, const std::vector<RDRow>& rows) {
  out << kRDCsvHeader << "\n";
  for (const RDRow& row : rows) {
    if (row.profile_id.find(',') != std::string::npos ||
        row.sequence.find(',') != std::string::npos)
      throw ConfigError("CSV fields must not contain commas: '" + row.profile_id + "'/'" +
                        row.sequence + "'");
    out << row.profile_id << ',' << to_string(row.config) << ',' << row.sequence << ','
        << row.point.qp << ',' << format_number(row.point.rate_kbps) << ','
        << format_number(row.point.psnr_y) << ',' << format_number(row.point.psnr_u) << ','
        << format_number(row.point.psnr_v) << ',' << format_number(row.point.vmaf) << ',';
    if (row.point.energy_j) out << format_number(*row.point.energy_j);
    out << ',';
    if (row.point.time_s) out << format_number(*row.point.time_s);
    out << "\n";
  }
}

std::map<std::pair<std::string, std::string>, RDCurve> group_curves(
    const std::vector<RDRow>& rows) {
  std::map<std::pair<std::string, std::string>, RDCurve> curves;
  for (const RDRow& row : rows) {
    RDCurve& curve = curves[{row.profile_id, row.sequence}];
    if (curve.points.empty()) {
      curve.profile_id = row.profile_id;
      curve.sequence = row.sequence;
      curve.config = row.config;
    } else if (curve.config != row.config) {
      throw ConfigError("profile '" + row.profile_id + "' appears under conflicting configs");
    }
    curve.points.push_back(row.point);
  }
  for (auto& [key, curve] : curves) validate_curve(curve);
  return curves;
}

}  // namespace tpx
