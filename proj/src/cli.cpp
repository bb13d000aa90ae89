#include "ambit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ambit/config.hpp"
#include "ambit/errors.hpp"
#include "ambit/reliability.hpp"
#include "ambit/workloads.hpp"
#include "json.hpp"

namespace ambit {

namespace {

using nlohmann::ordered_json;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint32_t> banks;
  std::optional<std::size_t> row_bits;
  std::uint64_t seed = 1;
  std::string out_path;
};

SimConfig resolve(const GlobalOpts& g) {
  SimConfig cfg = g.config_path.empty() ? SimConfig{} : load_config(g.config_path);
  if (g.banks) cfg.runtime.geometry.banks = *g.banks;
  if (g.row_bits) cfg.runtime.geometry.row_bits = *g.row_bits;
  const auto& geo = cfg.runtime.geometry;
  if (geo.banks == 0 || geo.subarrays_per_bank == 0) throw ConfigError("banks and subarrays must be positive");
  if (geo.row_bits == 0 || geo.row_bits % 512 != 0) throw ConfigError("row_bits must be a positive multiple of 512");
  cfg.finalize();
  return cfg;
}

std::string_view to_string(AapMode m) { return m == AapMode::naive ? "naive" : "split"; }

ordered_json config_json(const SimConfig& cfg) {
  const auto& rc = cfg.runtime;
  return ordered_json{{"banks", rc.geometry.banks},
                      {"subarrays_per_bank", rc.geometry.subarrays_per_bank},
                      {"row_bits", rc.geometry.row_bits},
                      {"aap_mode", to_string(rc.timing.mode)},
                      {"aap_ns", rc.timing.aap_ns()},
                      {"ap_ns", rc.timing.ap_ns()},
                      {"e_act_base_nj", rc.energy.e_act_base},
                      {"e_pre_nj", rc.energy.e_pre},
                      {"baseline", rc.baseline.name},
                      {"baseline_bytes_per_second", rc.baseline.bytes_per_second}};
}

ordered_json op_json(const OpReport& r) {
  return ordered_json{{"op", r.op},
                      {"latency_ns", r.latency_ns},
                      {"energy_nj_per_kb", r.energy_nj_per_kb},
                      {"ambit_gbps", r.ambit_gbps},
                      {"baseline_gbps", r.baseline_gbps},
                      {"speedup", r.speedup},
                      {"energy_reduction", r.energy_reduction}};
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// ---------------------------------------------------------------------------
// verify

struct Checker {
  std::ostream& out;
  int failed = 0;

  void check(const std::string& name, const std::function<std::string()>& body) {
    std::string why;
    try {
      why = body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      out << "PASS " << name << '\n';
    } else {
      out << "FAIL " << name << ": " << why << '\n';
      ++failed;
    }
  }
};

int run_verify(const SimConfig& cfg, std::uint64_t seed, std::size_t pairs, std::ostream& out) {
  Checker c{out};
  const auto& rc = cfg.runtime;
  const std::size_t width = rc.geometry.row_bits;
  std::mt19937_64 rng(seed);

  c.check("tra_majority", [&]() -> std::string {
    Chip chip(rc.geometry, rc.electrical);
    BitRow a(width), b(width), d(width);
    for (std::size_t i = 0; i < width; ++i) {
      a.set(i, i & 1);
      b.set(i, (i >> 1) & 1);
      d.set(i, (i >> 2) & 1);
    }
    for (unsigned t = 0; t < 3; ++t) chip.write_row(0, 0, row::T(t), t == 0 ? a : t == 1 ? b : d);
    chip.activate(0, 0, decode(RowAddress::b(12)));
    chip.precharge(0);
    const BitRow want = (a & b) | (b & d) | (d & a);
    for (unsigned t = 0; t < 3; ++t)
      if (chip.read_row(0, 0, row::T(t)) != want) return "T" + std::to_string(t) + " differs from majority";
    return {};
  });

  for (BbopKind k : kAllBbops) {
    c.check("bbop_" + std::string(to_string(k)), [&]() -> std::string {
      Chip chip(rc.geometry, rc.electrical);
      Controller ctrl(chip);
      for (std::size_t p = 0; p < pairs; ++p) {
        BitRow a = BitRow::random(width, rng), b = BitRow::random(width, rng);
        chip.write_row(0, 0, row::D(0), a);
        chip.write_row(0, 0, row::D(1), b);
        std::optional<RowAddress> src2;
        if (!is_unary(k)) src2 = RowAddress::d(1);
        ctrl.exec_bbop(k, RowAddress::d(2), RowAddress::d(0), src2);
        if (chip.read_row(0, 0, row::D(2)) != reference_op(k, a, &b))
          return "result differs from reference at pair " + std::to_string(p);
        if (chip.read_row(0, 0, row::D(0)) != a || chip.read_row(0, 0, row::D(1)) != b)
          return "source row modified at pair " + std::to_string(p);
      }
      return {};
    });
  }

  c.check("tmr_homomorphism", [&]() -> std::string {
    for (BbopKind k : kAllBbops) {
      for (std::size_t p = 0; p < pairs; ++p) {
        BitRow a = BitRow::random(256, rng), b = BitRow::random(256, rng);
        TmrCodeword ca = tmr_encode(a), cb = tmr_encode(b);
        TmrCodeword got = tmr_op(k, ca, &cb);
        TmrCodeword want = tmr_encode(reference_op(k, a, &b));
        if (got.payload != want.payload || got.replica != want.replica)
          return std::string(to_string(k)) + " is not homomorphic";
      }
    }
    return {};
  });

  c.check("bitmap_query", [&]() -> std::string {
    Runtime rt(rc);
    BitmapWorkload w = BitmapWorkload::random(1u << 14, 4, rng);
    BitmapResult got = bitmap_query(rt, w), want = bitmap_query_scalar(w);
    if (got.weekly_active_count != want.weekly_active_count) return "weekly_active_count mismatch";
    if (got.male_weekly_counts != want.male_weekly_counts) return "male_weekly_counts mismatch";
    if (!(got.tally == OpTally{24, 7, 5})) return "op tally differs from (6w, 2w-1, w+1)";
    return {};
  });

  c.check("bitweaving_scan", [&]() -> std::string {
    Runtime rt(rc);
    std::uniform_int_distribution<std::uint32_t> val(0, 255);
    std::vector<std::uint32_t> values(4096);
    for (auto& v : values) v = val(rng);
    BitWeavingTable table(values, 8);
    if (table.reassemble() != values) return "slices do not reassemble";
    LoadedColumn col(rt, table);
    for (int p = 0; p < 5; ++p) {
      std::uint32_t x = val(rng), y = val(rng);
      if (x > y) std::swap(x, y);
      if (col.scan(x, y).count != bitweaving_scan_scalar(table, x, y)) return "scan count mismatch";
    }
    return {};
  });

  c.check("set_ops", [&]() -> std::string {
    SetInstance inst = SetInstance::random(4096, 5, 64, rng);
    for (SetOpKind k : {SetOpKind::Union, SetOpKind::Intersection, SetOpKind::Difference}) {
      Runtime rt(rc);
      if (set_op(rt, k, inst).elements != set_op_sorted(k, inst)) return "result differs from sorted-set oracle";
    }
    return {};
  });

  out << (c.failed ? "verify: " + std::to_string(c.failed) + " check(s) failed\n" : std::string("verify: all checks passed\n"));
  return c.failed ? kExitVerifyFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOpts {
  std::string target;
  std::size_t users = 1u << 18;
  std::size_t weeks = 4;
  std::size_t rows = 1u << 16;
  unsigned bits = 12;
  std::size_t predicates = 10;
  std::size_t domain = 1u << 19;
  std::size_t sets = 15;
  std::size_t elements = 64;
};

ordered_json bench_ops(const SimConfig& cfg, const std::vector<BbopKind>& kinds) {
  const auto& rc = cfg.runtime;
  ordered_json ops = ordered_json::array();
  for (BbopKind k : kinds)
    ops.push_back(op_json(report_for(k, rc.geometry.banks, rc.timing, rc.energy, rc.baseline, rc.geometry.row_bytes())));
  return ops;
}

ordered_json bench_bitmap(const SimConfig& cfg, const BenchOpts& o, std::mt19937_64& rng) {
  Runtime rt(cfg.runtime);
  BitmapWorkload w = BitmapWorkload::random(o.users, o.weeks, rng);
  BitmapResult r = bitmap_query(rt, w);
  return ordered_json{{"users", o.users},
                      {"weeks", o.weeks},
                      {"weekly_active_count", r.weekly_active_count},
                      {"male_weekly_counts", r.male_weekly_counts},
                      {"op_tally", {{"or", r.tally.ors}, {"and", r.tally.ands}, {"bitcount", r.tally.bitcounts}}},
                      {"sim_ns", r.sim_ns},
                      {"baseline_ns", r.baseline_ns},
                      {"speedup", ratio(r.baseline_ns, r.sim_ns)}};
}

ordered_json bench_bitweaving(const SimConfig& cfg, const BenchOpts& o, std::mt19937_64& rng) {
  if (o.bits < 1 || o.bits > 32) throw ConfigError("--bits must be in 1..32");
  Runtime rt(cfg.runtime);
  const std::uint64_t top = o.bits == 32 ? 0xffffffffull : (1ull << o.bits) - 1;
  std::uniform_int_distribution<std::uint64_t> val(0, top);
  std::vector<std::uint32_t> values(o.rows);
  for (auto& v : values) v = static_cast<std::uint32_t>(val(rng));
  BitWeavingTable table(std::move(values), o.bits);
  LoadedColumn col(rt, table);
  ordered_json preds = ordered_json::array();
  double sim = 0.0, base = 0.0;
  std::size_t bbops = 0;
  for (std::size_t p = 0; p < o.predicates; ++p) {
    auto x = static_cast<std::uint32_t>(val(rng)), y = static_cast<std::uint32_t>(val(rng));
    if (x > y) std::swap(x, y);
    ScanResult r = col.scan(x, y);
    sim += r.sim_ns;
    base += r.baseline_ns;
    bbops += r.bbops;
    preds.push_back({{"c1", x}, {"c2", y}, {"count", r.count}, {"sim_ns", r.sim_ns}, {"baseline_ns", r.baseline_ns}});
  }
  return ordered_json{{"rows", o.rows}, {"bits", o.bits},         {"predicates", preds},
                      {"bbops", bbops}, {"sim_ns", sim},          {"baseline_ns", base},
                      {"speedup", ratio(base, sim)}};
}

ordered_json bench_setops(const SimConfig& cfg, const BenchOpts& o, std::mt19937_64& rng) {
  SetInstance inst = SetInstance::random(o.domain, o.sets, o.elements, rng);
  ordered_json results = ordered_json::array();
  const std::pair<SetOpKind, const char*> kinds[] = {
      {SetOpKind::Union, "union"}, {SetOpKind::Intersection, "intersection"}, {SetOpKind::Difference, "difference"}};
  for (auto [k, name] : kinds) {
    Runtime rt(cfg.runtime);
    SetOpResult r = set_op(rt, k, inst);
    results.push_back({{"op", name},
                       {"result_size", r.elements.size()},
                       {"bbops", r.bbops},
                       {"sim_ns", r.sim_ns},
                       {"baseline_ns", r.baseline_ns},
                       {"rbtree_ns_estimate", r.rbtree_ns_estimate},
                       {"speedup", ratio(r.baseline_ns, r.sim_ns)}});
  }
  return ordered_json{{"domain", o.domain}, {"sets", o.sets}, {"elements", o.elements}, {"results", results}};
}

ordered_json run_bench(const SimConfig& cfg, const BenchOpts& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ordered_json report{{"bench", o.target}, {"seed", seed}, {"config", config_json(cfg)}};
  if (o.target == "ops") {
    report["ops"] = bench_ops(cfg, {kAllBbops.begin(), kAllBbops.end()});
  } else if (auto k = parse_bbop(o.target)) {
    report["ops"] = bench_ops(cfg, {*k});
  } else if (o.target == "bitmap") {
    report["bitmap"] = bench_bitmap(cfg, o, rng);
  } else if (o.target == "bitweaving") {
    report["bitweaving"] = bench_bitweaving(cfg, o, rng);
  } else if (o.target == "setops") {
    report["setops"] = bench_setops(cfg, o, rng);
  } else {
    throw ConfigError("unknown bench target '" + o.target + "'");
  }
  return report;
}

// ---------------------------------------------------------------------------
// trace, table7

void run_trace(const SimConfig& cfg, BbopKind k, std::uint64_t seed, std::ostream& out) {
  const auto& rc = cfg.runtime;
  Chip chip(rc.geometry, rc.electrical);
  Controller ctrl(chip);
  std::mt19937_64 rng(seed);
  chip.write_row(0, 0, row::D(0), BitRow::random(rc.geometry.row_bits, rng));
  chip.write_row(0, 0, row::D(1), BitRow::random(rc.geometry.row_bits, rng));
  std::optional<RowAddress> src2;
  if (!is_unary(k)) src2 = RowAddress::d(1);
  ctrl.exec_bbop(k, RowAddress::d(2), RowAddress::d(0), src2).write_csv(out);
}

void run_table7(const SimConfig& cfg, std::ostream& out) {
  const auto& rc = cfg.runtime;
  TimingConfig naive = rc.timing, split = rc.timing;
  naive.mode = AapMode::naive;
  split.mode = AapMode::split;

  out << std::fixed;
  out << "Latency (ns)\n";
  out << std::left << std::setw(6) << "op" << std::right << std::setw(10) << "steps" << std::setw(10) << "naive"
      << std::setw(10) << "split" << '\n';
  for (BbopKind k : kAllBbops) {
    const auto& seq = sequence_for(k);
    out << std::left << std::setw(6) << to_string(k) << std::right << std::setw(10) << seq.size()
        << std::setprecision(0) << std::setw(10) << latency_of(seq, naive) << std::setw(10) << latency_of(seq, split)
        << '\n';
  }

  out << "\nEnergy (nJ/KB)\n";
  out << std::left << std::setw(6) << "op" << std::right << std::setw(10) << "ddr3" << std::setw(10) << "ambit"
      << std::setw(10) << "reduction" << '\n';
  for (BbopKind k : kAllBbops) {
    double base = baseline_energy_per_kb(k, rc.energy);
    double amb = energy_per_kb(canonical_trace(k), rc.energy);
    out << std::left << std::setw(6) << to_string(k) << std::right << std::setprecision(1) << std::setw(10) << base
        << std::setw(10) << amb << std::setw(9) << base / amb << "X\n";
  }

  out << "\nThroughput (GB/s)\n";
  out << std::left << std::setw(6) << "op";
  for (const auto& p : BandwidthPreset::all()) out << std::right << std::setw(10) << p.name;
  for (unsigned b : {1u, 2u, 4u, 8u}) out << std::setw(9) << "ambit-" << b;
  out << '\n';
  for (BbopKind k : kAllBbops) {
    out << std::left << std::setw(6) << to_string(k) << std::right << std::setprecision(1);
    for (const auto& p : BandwidthPreset::all()) out << std::setw(10) << baseline_throughput(k, p) / 1e9;
    for (unsigned b : {1u, 2u, 4u, 8u})
      out << std::setw(10) << ambit_throughput(k, b, split, rc.geometry.row_bytes()) / 1e9;
    out << '\n';
  }
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot open output " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bulk bitwise in-DRAM computation simulator", "ambit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--banks", g.banks, "Banks per chip")->check(CLI::Range(1u, 1024u));
  app.add_option("--row-bits", g.row_bits, "Bits per DRAM row");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--out", g.out_path, "Write output to a file");

  auto* verify = app.add_subcommand("verify", "Run the oracle suite")->fallthrough();
  std::size_t pairs = 200;
  verify->add_option("--pairs", pairs, "Random operand pairs per bbop")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Emit a JSON timing/energy report")->fallthrough();
  BenchOpts bo;
  bench->add_option("target", bo.target, "ops | <op> | bitmap | bitweaving | setops")->required();
  bench->add_option("--users", bo.users)->check(CLI::PositiveNumber);
  bench->add_option("--weeks", bo.weeks)->check(CLI::PositiveNumber);
  bench->add_option("--rows", bo.rows)->check(CLI::PositiveNumber);
  bench->add_option("--bits", bo.bits);
  bench->add_option("--predicates", bo.predicates);
  bench->add_option("--domain", bo.domain)->check(CLI::PositiveNumber);
  bench->add_option("--sets", bo.sets);
  bench->add_option("--elements", bo.elements);

  auto* mc = app.add_subcommand("mc", "Monte-Carlo TRA reliability CSV")->fallthrough();
  std::vector<double> variations;
  std::uint64_t trials = 10000;
  unsigned threads = 0;
  mc->add_option("--variation", variations, "Variation levels (fraction, e.g. 0.05)")->check(CLI::Range(0.0, 0.5));
  mc->add_option("--trials", trials)->check(CLI::PositiveNumber);
  mc->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* trace = app.add_subcommand("trace", "CSV command trace of one bbop")->fallthrough();
  std::string trace_op;
  trace->add_option("op", trace_op)->required();

  auto* table7 = app.add_subcommand("table7", "Latency, energy and throughput tables")->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    SimConfig cfg = resolve(g);
    OutputSink sink(g.out_path, out);
    std::ostream& os = sink.stream();

    if (verify->parsed()) return run_verify(cfg, g.seed, pairs, os);

    if (bench->parsed()) {
      os << run_bench(cfg, bo, g.seed).dump(2) << '\n';
    } else if (mc->parsed()) {
      if (variations.empty()) variations.assign(kReferenceVariations.begin(), kReferenceVariations.end());
      std::vector<std::pair<double, McResult>> rows;
      for (double v : variations) {
        VariationModel m;
        m.variation = v;
        m.seed = g.seed;
        m.nominal = cfg.runtime.electrical;
        rows.emplace_back(v, monte_carlo(m, trials, threads));
      }
      write_mc_csv(os, rows);
    } else if (trace->parsed()) {
      auto k = parse_bbop(trace_op);
      if (!k) throw ConfigError("unknown op '" + trace_op + "'");
      run_trace(cfg, *k, g.seed, os);
    } else if (table7->parsed()) {
      run_table7(cfg, os);
    }
    os.flush();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitVerifyFailed;
  }
}

}  // namespace ambit
