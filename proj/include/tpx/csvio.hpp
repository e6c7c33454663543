#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tpx/bdmetrics.hpp"

namespace tpx {

// One row of the pinned RD CSV schema:
//   profile_id,config,sequence,qp,rate_kbps,psnr_y,psnr_u,psnr_v,vmaf,energy_j,time_s
// energy_j and time_s may be empty.
struct RDRow {
  std::string profile_id;
  CodingConfig config = CodingConfig::RA;
  std::string sequence;
  RDPoint point;
};

extern const char* const kRDCsvHeader;

std::vector<RDRow> read_rd_csv(std::istream& in, const std::string& source_name);
std::vector<RDRow> read_rd_csv_file(const std::string& path);
void write_rd_csv(std::ostream& out, const std::vector<RDRow>& rows);

// Groups rows into one curve per (profile_id, sequence) and validates each.
std::map<std::pair<std::string, std::string>, RDCurve> group_curves(
    const std::vector<RDRow>& rows);

}  // namespace tpx
