#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qsep/field.hpp"

namespace qsep {

/// One timed kernel call; one CSV row.
struct BenchRecord {
  std::string op;
  std::string format;
  int n = 0;
  int s = 0;
  int t = 0;
  int rep = 0;
  double seconds = 0.0;
  size_t storage_elems = 0;
};

struct BenchParams {
  std::vector<std::string> formats{"sss", "hss", "bruhat"};
  std::vector<std::string> ops{"build", "apply"};
  int n = 1024;
  std::vector<int> s_list{8, 16, 32};
  int reps = 5;
  uint64_t seed = 1;
  uint32_t p = kDefaultPrime;
  int v = 64;  // block-vector width for apply
};

/// Runs every (op, format, s, rep) cell.  Instances are regenerated per rep
/// from seed + rep; only the kernel call is timed (wall clock, I/O and
/// instance generation excluded).  Unsupported cells (hss add/mul,
/// bruhat mul) raise ParamError up front.
std::vector<BenchRecord> bench_run(const BenchParams& params);

/// Header "op,format,n,s,t,rep,seconds,storage_elems" plus one row per
/// record.
void bench_write_csv(std::ostream& os, const std::vector<BenchRecord>& recs);

}  // namespace qsep
