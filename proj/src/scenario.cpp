#include "qmetro/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "json.hpp"

#include "qmetro/bounds.hpp"
#include "qmetro/measurements.hpp"
#include "qmetro/probes.hpp"

namespace qmetro {

namespace {

using nlohmann::json;

void checkKeys(const json& obj, const char* where,
               std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ContractError(std::string("config: unknown key '") + key +
                          "' in " + where);
    }
  }
}

std::vector<Axis> parseAxes(const std::string& s) {
  if (s.empty()) throw ContractError("config: axes must be nonempty");
  std::vector<Axis> axes;
  for (char c : s) axes.push_back(axisFromString(c));
  return axes;
}

BoundKind parseBound(const std::string& s) {
  if (s == "sld") return BoundKind::Sld;
  if (s == "holevo") return BoundKind::Holevo;
  if (s == "nhb") return BoundKind::Nhb;
  throw ContractError("config: unknown bound kind '" + s + "'");
}

struct Row {
  std::string channel;
  double s1 = 0, s2 = 0;
  std::string probeId;
  Index n = 0;
  int m = 1;
  std::string boundKind;
  double value = 0;
  double v1 = 0, v2 = 0, v3 = 0;
  double precision = 0;
  double gap = 0;
  double wallMs = 0;
  std::vector<CMat> xOps;  // certificates
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void fillPerParameter(Row& row, const std::vector<double>& pp) {
  if (pp.size() > 0) row.v1 = pp[0];
  if (pp.size() > 1) row.v2 = pp[1];
  if (pp.size() > 2) row.v3 = pp[2];
}

struct ProbeInstance {
  std::string id;
  DensityMatrix state;
};

struct Job {
  std::function<Row()> run;
};

KrausChannel channelFor(ChannelKind kind, int qubits, double s1, double s2,
                        bool dual) {
  if (qubits == 1) return makeChannel(kind, s1);
  return liftToTwoQubits(makeChannel(kind, s1),
                         dual ? makeChannel(kind, s2)
                              : makeChannel(ChannelKind::Identity, 0));
}

BoundResult computeBound(const EstimationProblem& p, BoundKind kind) {
  switch (kind) {
    case BoundKind::Sld: return sldBound(p);
    case BoundKind::Holevo: return holevoBound(p);
    case BoundKind::Nhb: return nhb(p);
  }
  throw ContractError("invalid bound kind");
}

}  // namespace

int runScenarioFile(const std::string& path, const RunOptions& opts) {
  json cfg;
  std::vector<Job> jobs;
  std::string outName;
  try {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "config: cannot open " << path << "\n";
      return kExitConfig;
    }
    cfg = json::parse(in);
    checkKeys(cfg, "scenario", {"name", "channel", "tasks", "output"});
    const std::string name = cfg.value("name", "scenario");
    outName = cfg.value("output", name + ".csv");

    const json& chCfg = cfg.at("channel");
    checkKeys(chCfg, "channel", {"kind", "strengths", "strengths2"});
    const ChannelKind chKind =
        channelKindFromString(chCfg.at("kind").get<std::string>());
    const std::string chName = toString(chKind);
    const std::vector<double> strengths =
        chCfg.at("strengths").get<std::vector<double>>();
    std::vector<double> strengths2;
    const bool dual = chCfg.contains("strengths2");
    if (dual) strengths2 = chCfg.at("strengths2").get<std::vector<double>>();
    for (double s : strengths) {
      if (s < 0.0 || s > 1.0) {
        throw ContractError("config: channel strengths must lie in [0,1]");
      }
    }
    for (double s : strengths2) {
      if (s < 0.0 || s > 1.0) {
        throw ContractError("config: channel strengths must lie in [0,1]");
      }
    }
    if (!dual) strengths2 = {0.0};

    const json& tasks = cfg.at("tasks");
    if (!tasks.is_array() || tasks.empty()) {
      throw ContractError("config: need at least one task");
    }

    std::uint64_t taskIndex = 0;
    for (const json& task : tasks) {
      ++taskIndex;
      checkKeys(task, "task",
                {"probe", "qubits", "axes", "bounds", "copies", "schemes",
                 "scheme_params", "restarts", "tradeoff_points"});

      const int qubits = task.value("qubits", 1);
      if (qubits < 1 || qubits > 2) {
        throw ContractError("config: qubits must be 1 or 2");
      }

      // Measurement-scheme rows: driven only by the strength grid.
      if (task.contains("schemes")) {
        SchemeParams sp;
        if (task.contains("scheme_params")) {
          const json& p = task.at("scheme_params");
          checkKeys(p, "scheme_params", {"a", "b", "delta", "nx_fraction",
                                         "probe_a"});
          sp.a = p.value("a", sp.a);
          sp.b = p.value("b", sp.b);
          sp.delta = p.value("delta", sp.delta);
          sp.nxFraction = p.value("nx_fraction", sp.nxFraction);
          sp.probeA = p.value("probe_a", sp.probeA);
        }
        for (const json& sn : task.at("schemes")) {
          const std::string schemeName = sn.get<std::string>();
          for (double s1 : strengths) {
            jobs.push_back({[=]() {
              Row row;
              row.channel = chName;
              row.s1 = s1;
              row.boundKind = schemeName;
              SchemeParams params = sp;
              params.noise = s1;
              const Scheme sch = schemeLibrary(schemeName, params);
              row.probeId = "scheme";
              row.n = sch.problem.nParams();
              row.m = sch.finite.copies;
              const MseReport rep =
                  asymptoticMse(sch.problem, sch.povm, sch.est);
              row.value = rep.total;
              fillPerParameter(row, rep.per_parameter);
              row.precision = static_cast<double>(row.n) / row.value;
              return row;
            }});
          }
        }
      }

      if (task.contains("tradeoff_points")) {
        const int pts = task.at("tradeoff_points").get<int>();
        if (pts < 2) throw ContractError("config: tradeoff_points must be >= 2");
        for (double s1 : strengths) {
          for (int i = 0; i < pts; ++i) {
            const double t = (i + 1) * (M_PI / 2.0) / (pts + 1);
            jobs.push_back({[=]() {
              Row row;
              row.channel = chName;
              row.s1 = s1;
              row.probeId = "bell0";
              row.n = 2;
              row.boundKind = "tradeoff";
              const auto curve =
                  tradeoffCurve(s1, {{std::cos(t), std::sin(t)}});
              row.v1 = curve[0].vx;
              row.v2 = curve[0].vy;
              row.value = row.v1 + row.v2;
              row.precision = 2.0 / row.value;
              return row;
            }});
          }
        }
      }

      if (!task.contains("probe")) continue;
      const std::vector<Axis> axes =
          parseAxes(task.value("axes", std::string("x")));
      std::vector<BoundKind> bounds;
      for (const json& b : task.at("bounds")) {
        bounds.push_back(parseBound(b.get<std::string>()));
      }
      std::vector<int> copies = task.value("copies", std::vector<int>{1});

      const json& probe = task.at("probe");
      bool optimize = false;
      std::vector<ProbeInstance> instances;
      if (probe.is_string()) {
        const std::string ps = probe.get<std::string>();
        if (ps == "optimize") {
          optimize = true;
        } else if (ps == "ket0" || ps == "ket1") {
          if (qubits != 1) {
            throw ContractError("config: " + ps + " is a single-qubit probe");
          }
          instances.push_back(
              {ps, pureState(basisKet(2, ps == "ket0" ? 0 : 1))});
        } else {
          throw ContractError("config: unknown probe '" + ps + "'");
        }
      } else {
        checkKeys(probe, "probe",
                  {"bloch", "bloch_grid", "bell", "weighted", "raw", "random"});
        if (probe.contains("bloch")) {
          const auto tp = probe.at("bloch").get<std::vector<double>>();
          if (tp.size() != 2) throw ContractError("config: bloch needs [theta,phi]");
          ProbeSpec spec;
          spec.kind = ProbeKind::Bloch;
          spec.theta = tp[0];
          spec.phi = tp[1];
          instances.push_back({"bloch(" + fmt(tp[0]) + "," + fmt(tp[1]) + ")",
                               buildProbe(spec)});
        } else if (probe.contains("bloch_grid")) {
          const auto g = probe.at("bloch_grid").get<std::vector<int>>();
          if (g.size() != 2 || g[0] < 2 || g[1] < 2) {
            throw ContractError("config: bloch_grid needs [n_theta, n_phi] >= 2");
          }
          for (int it = 0; it < g[0]; ++it) {
            for (int ip = 0; ip < g[1]; ++ip) {
              ProbeSpec spec;
              spec.kind = ProbeKind::Bloch;
              spec.theta = M_PI * it / (g[0] - 1);
              spec.phi = 2.0 * M_PI * ip / g[1];
              instances.push_back({"bloch(" + fmt(spec.theta) + "," +
                                       fmt(spec.phi) + ")",
                                   buildProbe(spec)});
            }
          }
        } else if (probe.contains("bell")) {
          ProbeSpec spec;
          spec.kind = ProbeKind::Bell;
          spec.qubits = 2;
          spec.bellIndex = probe.at("bell").get<int>();
          instances.push_back(
              {"bell" + std::to_string(spec.bellIndex), buildProbe(spec)});
        } else if (probe.contains("weighted")) {
          ProbeSpec spec;
          spec.kind = ProbeKind::Weighted;
          spec.qubits = 2;
          spec.weightedA = probe.at("weighted").get<double>();
          instances.push_back(
              {"weighted(" + fmt(spec.weightedA) + ")", buildProbe(spec)});
        } else if (probe.contains("raw")) {
          const auto flat = probe.at("raw").get<std::vector<double>>();
          if (flat.size() % 2 != 0) {
            throw ContractError("config: raw probe needs re,im pairs");
          }
          CVec v(flat.size() / 2);
          for (Index i = 0; i < v.size(); ++i) {
            v(i) = Complex(flat[2 * i], flat[2 * i + 1]);
          }
          ProbeSpec spec;
          spec.kind = ProbeKind::Raw;
          spec.raw = v;
          instances.push_back({"raw", buildProbe(spec)});
        } else if (probe.contains("random")) {
          const json& r = probe.at("random");
          checkKeys(r, "random", {"n", "seed"});
          const int nr = r.at("n").get<int>();
          const std::uint64_t rseed = r.value("seed", opts.seed);
          const auto states = haarRandom(qubits, nr, rseed);
          for (int i = 0; i < nr; ++i) {
            instances.push_back({"random" + std::to_string(i), states[i]});
          }
        }
      }

      for (double s1 : strengths) {
        for (double s2 : strengths2) {
          const KrausChannel ch = channelFor(chKind, qubits, s1, s2, dual);
          if (optimize) {
            const int restarts = task.value("restarts", 16);
            for (BoundKind bk : bounds) {
              const std::uint64_t oseed = opts.seed + 1000 * taskIndex;
              jobs.push_back({[=]() {
                Row row;
                row.channel = chName;
                row.s1 = s1;
                row.s2 = dual ? s2 : 0.0;
                row.probeId = "optimize";
                row.n = static_cast<Index>(axes.size());
                row.boundKind = toString(bk);
                const OptimizeResult res =
                    optimizeProbe(ch, axes, bk, qubits, restarts, oseed);
                row.value = res.bound.value;
                fillPerParameter(row, res.bound.per_parameter);
                row.gap = res.bound.gap;
                row.precision = static_cast<double>(row.n) / row.value;
                row.xOps = res.bound.x_ops;
                return row;
              }});
            }
            continue;
          }
          for (const ProbeInstance& inst : instances) {
            for (int m : copies) {
              if (m < 1) throw ContractError("config: copies must be >= 1");
              for (BoundKind bk : bounds) {
                if (m > 1 && bk == BoundKind::Sld) {
                  throw ContractError(
                      "config: sld is not defined for copy-scaled rows");
                }
                jobs.push_back({[=]() {
                  Row row;
                  row.channel = chName;
                  row.s1 = s1;
                  row.s2 = dual ? s2 : 0.0;
                  row.probeId = inst.id;
                  row.n = static_cast<Index>(axes.size());
                  row.m = m;
                  row.boundKind = toString(bk);
                  const EstimationProblem p = buildProblem(inst.state, ch, axes);
                  const BoundResult res =
                      (m == 1) ? computeBound(p, bk)
                               : copyScaledBounds(p, m, bk);
                  row.value = res.value;
                  fillPerParameter(row, res.per_parameter);
                  row.gap = res.gap;
                  row.precision = static_cast<double>(row.n) / row.value;
                  row.xOps = res.x_ops;
                  return row;
                }});
              }
            }
          }
        }
      }
    }
    if (jobs.empty()) {
      throw ContractError("config: scenario produced no work");
    }
  } catch (const ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  // Execute with a bounded pool; rows keep enumeration order.
  std::vector<Row> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  int workers = opts.workers > 0
                    ? opts.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<std::size_t>(workers, jobs.size());

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto start = std::chrono::steady_clock::now();
      try {
        rows[i] = jobs[i].run();
      } catch (...) {
        errors[i] = std::current_exception();
      }
      rows[i].wallMs = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ResourceError& e) {
      std::cerr << "resource error (row " << i << "): " << e.what() << "\n";
      return kExitResource;
    } catch (const SolverError& e) {
      std::cerr << "solver error (row " << i << "): " << e.what() << "\n";
      return kExitSolver;
    } catch (const std::exception& e) {
      std::cerr << "config error (row " << i << "): " << e.what() << "\n";
      return kExitConfig;
    }
  }

  const std::string outPath = opts.outDir + "/" + outName;
  std::ofstream out(outPath);
  if (!out) {
    std::cerr << "cannot write " << outPath << "\n";
    return kExitConfig;
  }
  out << "channel,strength1,strength2,probe_id,n_params,M,bound_kind,value,"
         "v1,v2,v3,precision,gap,wall_ms\n";
  for (const Row& row : rows) {
    out << row.channel << ',' << fmt(row.s1) << ',' << fmt(row.s2) << ','
        << row.probeId << ',' << row.n << ',' << row.m << ',' << row.boundKind
        << ',' << fmt(row.value) << ',' << fmt(row.v1) << ',' << fmt(row.v2)
        << ',' << fmt(row.v3) << ',' << fmt(row.precision) << ','
        << fmt(row.gap) << ',' << fmt(row.wallMs) << '\n';
  }
  out.close();
  if (opts.verbose) {
    std::cerr << "wrote " << rows.size() << " rows to " << outPath << "\n";
  }

  if (opts.certificates) {
    json certs = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].xOps.empty()) continue;
      json entry;
      entry["row"] = i;
      entry["bound_kind"] = rows[i].boundKind;
      json ops = json::array();
      for (const CMat& x : rows[i].xOps) {
        json flat = json::array();
        for (Index rr = 0; rr < x.rows(); ++rr) {
          for (Index cc = 0; cc < x.cols(); ++cc) {
            flat.push_back(x(rr, cc).real());
            flat.push_back(x(rr, cc).imag());
          }
        }
        ops.push_back(std::move(flat));
      }
      entry["x_ops"] = std::move(ops);
      certs.push_back(std::move(entry));
    }
    const std::string certPath =
        outPath.substr(0, outPath.rfind('.')) + "_certificates.json";
    std::ofstream cout(certPath);
    cout << certs.dump(1) << "\n";
  }
  return kExitOk;
}

}  // namespace qmetro
