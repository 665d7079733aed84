// hcycle: command-line front end.
// Exit status: 0 success, 1 refusal (bounds, failed hypotheses, failed
// checks), 2 malformed input.

#include "hcycle/certify.hpp"
#include "hcycle/covers.hpp"
#include "hcycle/hurwitz.hpp"
#include "hcycle/io.hpp"
#include "hcycle/lattice.hpp"
#include "hcycle/modular.hpp"
#include "hcycle/strata.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

using namespace hcycle;

namespace {

constexpr int kRefused = 1;
constexpr int kMalformed = 2;

// Single coefficients are computed from a full table up to the index.
long max_index() { return env_bound("HCYCLE_MAX_INDEX", 200'000); }

void check_index(long d, const char *what) {
  if (d > max_index())
    throw Refusal(std::string(what) + ": index " + std::to_string(d) + " exceeds the bound " +
                  std::to_string(max_index()) + " (HCYCLE_MAX_INDEX)");
}

std::vector<int> parse_int_list(const std::string &text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception &) {
      throw std::invalid_argument("malformed integer '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("malformed integer '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

GraphCover read_cover(const std::string &path) { return io::cover_from_json(io::read_json_file(path)); }

void print_json(const io::json &j) { std::cout << j.dump(2) << "\n"; }

struct ParamFlags {
  HurwitzParams p;
  void add(CLI::App *cmd, bool with_h = true) {
    cmd->add_option("--g", p.g, "source genus")->required();
    if (with_h) cmd->add_option("--h", p.h, "target genus")->required();
    cmd->add_option("--d", p.d, "degree")->required();
    cmd->add_option("--m2", p.m2, "marked pairs")->default_val(0);
    cmd->add_option("--md", p.md, "marked d-tuples")->default_val(0);
    cmd->add_option("--n", p.n, "marked ramification points")->default_val(0);
  }
};

struct BoundFlags {
  StrataBounds b;
  void add(CLI::App *cmd) {
    cmd->add_option("--max-genus", b.max_genus, "enumeration bound on g")->capture_default_str();
    cmd->add_option("--max-degree", b.max_degree, "enumeration bound on d")->capture_default_str();
    cmd->add_option("--max-candidates", b.max_candidates, "candidate budget (HCYCLE_MAX_CANDIDATES)")
        ->capture_default_str();
  }
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Hurwitz cycle toolkit: modular coefficients, covers, strata and certificates"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  unsigned workers = 1;
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();

  std::function<int()> action;

  long index = 0;
  auto *tau_cmd = app.add_subcommand("tau", "Ramanujan tau(d)");
  tau_cmd->add_option("d", index)->required();
  tau_cmd->callback([&] {
    action = [&] {
      check_index(index, "tau");
      std::cout << tau(index).get_str() << "\n";
      return 0;
    };
  });

  auto *ad_cmd = app.add_subcommand("ad", "coefficient a_d of eta^48");
  ad_cmd->add_option("d", index)->required();
  ad_cmd->callback([&] {
    action = [&] {
      check_index(index, "ad");
      std::cout << a_coeff(index).get_str() << "\n";
      return 0;
    };
  });

  long scan_max = 0;
  auto scan = [&](CoeffKind kind, const char *name) {
    return [&, kind, name] {
      if (scan_max < 1) throw std::invalid_argument(std::string(name) + ": max must be positive");
      if (scan_max > 50 * max_index())
        throw Refusal(std::string(name) + ": max exceeds 50 * HCYCLE_MAX_INDEX = " + std::to_string(50 * max_index()));
      auto zeros = scan_nonvanishing(kind, static_cast<std::size_t>(scan_max), workers);
      for (auto z : zeros) std::cout << z << "\n";
      std::cerr << name << ": " << zeros.size() << " vanishing coefficient(s) up to " << scan_max << "\n";
      return 0;
    };
  };
  auto *scan_tau = app.add_subcommand("scan-tau", "indices d <= max with tau(d) = 0");
  scan_tau->add_option("max", scan_max)->required();
  scan_tau->callback([&] { action = scan(CoeffKind::Tau, "scan-tau"); });
  auto *scan_ad = app.add_subcommand("scan-ad", "indices 2 <= d <= max with a_d = 0");
  scan_ad->add_option("max", scan_max)->required();
  scan_ad->callback([&] { action = scan(CoeffKind::A, "scan-ad"); });

  long hk = 0, hprec = 0;
  auto *hecke = app.add_subcommand("hecke-check", "check T_k(eta^24) = tau(k) eta^24 at precision prec");
  hecke->add_option("k", hk)->required();
  hecke->add_option("prec", hprec)->required();
  hecke->callback([&] {
    action = [&] {
      if (hk < 1 || hprec < 2) throw std::invalid_argument("hecke-check: need k >= 1 and prec >= 2");
      check_index(hprec, "hecke-check");
      auto f = eta_power(24, static_cast<std::size_t>(hprec));
      auto tf = hecke_apply(hk, f);
      Integer ev = tau(hk);
      for (std::size_t n = 0; n < tf.prec(); ++n)
        if (tf[n] != ev * f[n]) {
          std::cerr << "hecke-check: mismatch at q^" << n << "\n";
          return kRefused;
        }
      std::cout << ev.get_str() << "\n" << tf.prec() << "\n";
      return 0;
    };
  });

  long lk = 0;
  auto *subl = app.add_subcommand("sublattices", "index-k sublattices of Z^2 in Hermite normal form");
  subl->add_option("k", lk)->required();
  subl->callback([&] {
    action = [&] {
      for (const auto &m : sublattices(lk)) std::cout << m.a << " " << m.b << " 0 " << m.d << "\n";
      return 0;
    };
  });
  auto *isoc = app.add_subcommand("isogeny-components", "Smith classes (e1, e2) of determinant-k matrices");
  isoc->add_option("k", lk)->required();
  isoc->callback([&] {
    action = [&] {
      for (const auto &c : double_cosets(lk)) std::cout << c.e1 << " " << c.e2 << "\n";
      return 0;
    };
  });

  MonodromyProblem mp;
  std::string profiles;
  HurwitzBounds hb;
  auto *hur = app.add_subcommand("hurwitz", "Hurwitz number by monodromy enumeration");
  hur->add_option("--degree", mp.degree)->required();
  hur->add_option("--target-genus", mp.target_genus)->default_val(0);
  hur->add_option("--profiles", profiles, "e.g. \"2,1,1;2,1,1\"")->default_val("");
  auto *conn = hur->add_flag("--connected", "count connected covers only");
  hur->add_option("--max-degree", hb.max_degree, "HCYCLE_MAX_DEGREE")->capture_default_str();
  hur->add_option("--max-tuples", hb.max_tuples, "HCYCLE_MAX_TUPLES")->capture_default_str();
  hur->callback([&] {
    action = [&] {
      mp.profiles = parse_profiles(profiles);
      mp.connected = conn->count() > 0;
      auto r = count_tuples(mp, hb, workers);
      std::cout << "weighted " << to_string(r.weighted) << "\n"
                << "classes " << r.classes.get_str() << "\n"
                << "tuples " << r.tuples.get_str() << "\n";
      if (!r.diagnostic.empty()) std::cout << "note " << r.diagnostic << "\n";
      return 0;
    };
  });

  std::string path;
  bool require_connected = false;
  auto *vc = app.add_subcommand("validate-cover", "check the admissible-cover conditions");
  vc->add_option("file", path)->required();
  vc->add_flag("--connected-source", require_connected, "also require a connected source");
  vc->callback([&] {
    action = [&] {
      auto v = validate_cover(read_cover(path), require_connected);
      if (v.ok) {
        std::cout << "ok\n";
        return 0;
      }
      std::cout << "invalid: " << v.violation << "\n";
      return kRefused;
    };
  });

  std::string extra;
  auto *cd = app.add_subcommand("cover-dim", "dimension of the stratum of covers");
  cd->add_option("file", path)->required();
  cd->add_option("--extra-marks", extra, "extra marked points per target vertex, comma separated");
  cd->callback([&] {
    action = [&] {
      auto c = read_cover(path);
      if (auto v = validate_cover(c); !v) throw std::invalid_argument("cover-dim: invalid cover: " + v.violation);
      std::cout << stratum_dimension(c, parse_int_list(extra)) << "\n";
      return 0;
    };
  });

  std::string a_edges;
  auto *cm = app.add_subcommand("cover-mult", "intersection multiplicity for an edge selection");
  cm->add_option("file", path)->required();
  cm->add_option("--a-edges", a_edges, "selected source edges, comma separated")->required();
  cm->callback([&] {
    action = [&] {
      auto c = read_cover(path);
      if (auto v = validate_cover(c); !v) throw std::invalid_argument("cover-mult: invalid cover: " + v.violation);
      std::cout << intersection_multiplicity(c, parse_int_list(a_edges)).get_str() << "\n";
      return 0;
    };
  });

  bool include_zero = false;
  int eg = 0, em2 = 0, ed = 0;
  BoundFlags eb;
  auto *ce = app.add_subcommand("classify-equal12", "pullback to M(1,11) x M(1,11)");
  ce->add_option("--g", eg)->required();
  ce->add_option("--m2", em2)->required();
  ce->add_option("--d", ed)->required();
  ce->add_flag("--include-zero", include_zero, "also list zero-by-dimension contributions");
  eb.add(ce);
  ce->callback([&] {
    action = [&] {
      print_json(io::to_json(classify_equal12(eg, em2, ed, eb.b, workers), include_zero));
      return 0;
    };
  });

  ParamFlags dp;
  std::string shape;
  BoundFlags db;
  auto *cdv = app.add_subcommand("classify-divisor", "pullback to a rational-tail or elliptic-tail divisor");
  cdv->add_option("--shape", shape)->required()->check(CLI::IsMember({"rational-tail", "elliptic-tail"}));
  dp.add(cdv);
  cdv->add_flag("--include-zero", include_zero, "also list zero-by-dimension contributions");
  db.add(cdv);
  cdv->callback([&] {
    action = [&] {
      auto s = shape == "rational-tail" ? DivisorShape::RationalTail : DivisorShape::EllipticTail;
      print_json(io::to_json(classify_divisor_pullback(dp.p, s, db.b, workers), include_zero));
      return 0;
    };
  });

  ParamFlags cp;
  int cs = 0;
  BoundFlags cb;
  auto *ccb = app.add_subcommand("classify-comb", "pullback to the comb stratum");
  cp.add(ccb);
  ccb->add_option("--s", cs, "points per elliptic tail")->required();
  ccb->add_flag("--include-zero", include_zero, "also list zero-by-dimension contributions");
  cb.add(ccb);
  ccb->callback([&] {
    action = [&] {
      print_json(io::to_json(classify_comb_pullback(cp.p, cs, cb.b, workers), include_zero));
      return 0;
    };
  });

  ParamFlags tp;
  std::string emit;
  auto *cert = app.add_subcommand("certify", "build a reduction certificate");
  tp.add(cert);
  cert->add_option("--emit", emit, "write the certificate here instead of stdout");
  cert->callback([&] {
    action = [&] {
      auto j = io::to_json(build_certificate(tp.p));
      if (emit.empty()) {
        print_json(j);
      } else {
        io::write_json_file(emit, j);
        std::cout << "wrote " << emit << "\n";
      }
      return 0;
    };
  });

  auto *ver = app.add_subcommand("verify", "replay a certificate");
  ver->add_option("file", path)->required();
  ver->callback([&] {
    action = [&] {
      auto r = verify_certificate_detailed(io::certificate_from_json(io::read_json_file(path)));
      if (r.ok) {
        std::cout << "valid\n";
        return 0;
      }
      std::cout << "invalid: " << r.reason << "\n";
      return kRefused;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    return action();
  } catch (const Refusal &e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const std::out_of_range &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  }
}
