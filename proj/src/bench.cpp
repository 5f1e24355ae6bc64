#include "qsep/bench.hpp"

#include <chrono>
#include <functional>
#include <ostream>

#include "qsep/bruhat.hpp"
#include "qsep/hss.hpp"
#include "qsep/qsgen.hpp"
#include "qsep/sss.hpp"

namespace qsep {

namespace {

double timed(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

bool supported(const std::string& op, const std::string& format) {
  if (op == "build" || op == "apply" || op == "expand") return true;
  if (op == "add") return format == "sss" || format == "bruhat";
  if (op == "mul") return format == "sss";
  return false;
}

}  // namespace

std::vector<BenchRecord> bench_run(const BenchParams& params) {
  const PrimeField f(params.p);
  for (const auto& fmt : params.formats)
    if (fmt != "sss" && fmt != "hss" && fmt != "bruhat")
      throw ParamError("unknown format '" + fmt + "'");
  for (const auto& op : params.ops)
    for (const auto& fmt : params.formats)
      if (!supported(op, fmt))
        throw ParamError("op '" + op + "' is not available for format '" +
                         fmt + "'");

  std::vector<BenchRecord> recs;
  for (const auto& op : params.ops) {
    for (const auto& fmt : params.formats) {
      for (int s : params.s_list) {
        for (int rep = 0; rep < params.reps; ++rep) {
          SeededRng rng(params.seed + uint64_t(rep));
          DenseMatrix a = random_qs_dense(f, params.n, s, rng);
          BenchRecord rec;
          rec.op = op;
          rec.format = fmt;
          rec.n = params.n;
          rec.s = s;
          rec.rep = rep;
          const int tsss = s == 0 ? 1 : s;
          const int thss = s == 0 ? 2 : 2 * s;

          if (fmt == "sss") {
            SSSGenerator g;
            if (op == "build") {
              rec.seconds = timed([&] { g = sss_from_dense(a, tsss); });
            } else {
              g = sss_from_dense(a, tsss);
            }
            rec.t = g.t;
            if (op == "apply") {
              DenseMatrix b = DenseMatrix::random(f, params.n, params.v, rng);
              DenseMatrix c(f, params.n, params.v);
              rec.seconds = timed([&] { c = sss_apply(g, b, c); });
            } else if (op == "expand") {
              DenseMatrix x;
              rec.seconds = timed([&] { x = sss_expand(g); });
            } else if (op == "add" || op == "mul") {
              SeededRng rng2 = rng.split(0x5eed);
              DenseMatrix a2 = random_qs_dense(f, params.n, s, rng2);
              SSSGenerator g2 = sss_from_dense(a2, tsss);
              SSSGenerator sum;
              if (op == "add")
                rec.seconds = timed([&] { sum = sss_add(g, g2); });
              else
                rec.seconds = timed([&] { sum = sss_mul(g, g2); });
              rec.storage_elems = sum.storage();
              rec.t = sum.t;
              recs.push_back(rec);
              continue;
            }
            rec.storage_elems = g.storage();
          } else if (fmt == "hss") {
            HSSGenerator g;
            if (op == "build") {
              rec.seconds = timed([&] { g = hss_from_dense(a, thss); });
            } else {
              g = hss_from_dense(a, thss);
            }
            rec.t = g.t;
            if (op == "apply") {
              DenseMatrix b = DenseMatrix::random(f, params.n, params.v, rng);
              DenseMatrix c(f, params.n, params.v);
              rec.seconds = timed([&] { c = hss_apply(g, b, c); });
            } else if (op == "expand") {
              DenseMatrix x;
              rec.seconds = timed([&] { x = hss_expand(g); });
            }
            rec.storage_elems = g.storage();
          } else {
            BruhatGenerator g;
            if (op == "build") {
              rec.seconds = timed([&] { g = bruhat_from_dense(a); });
            } else {
              g = bruhat_from_dense(a);
            }
            rec.t = g.t;
            if (op == "apply") {
              DenseMatrix b = DenseMatrix::random(f, params.n, params.v, rng);
              DenseMatrix c(f, params.n, params.v);
              rec.seconds = timed([&] { c = bruhat_apply(g, b, c); });
            } else if (op == "expand") {
              DenseMatrix x;
              rec.seconds = timed([&] { x = bruhat_expand(g); });
            } else if (op == "add") {
              SeededRng rng2 = rng.split(0x5eed);
              DenseMatrix a2 = random_qs_dense(f, params.n, s, rng2);
              BruhatGenerator g2 = bruhat_from_dense(a2);
              BruhatGenerator sum;
              rec.seconds = timed([&] { sum = bruhat_add(g, g2); });
              rec.storage_elems = sum.storage();
              rec.t = sum.t;
              recs.push_back(rec);
              continue;
            }
            rec.storage_elems = g.storage();
          }
          recs.push_back(rec);
        }
      }
    }
  }
  return recs;
}

void bench_write_csv(std::ostream& os, const std::vector<BenchRecord>& recs) {
  os << "op,format,n,s,t,rep,seconds,storage_elems\n";
  for (const auto& r : recs) {
    os << r.op << ',' << r.format << ',' << r.n << ',' << r.s << ',' << r.t
       << ',' << r.rep << ',' << r.seconds << ',' << r.storage_elems << '\n';
  }
}

}  // namespace qsep
