#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#include "jsrcert/certificate_io.hpp"
#include "jsrcert/families.hpp"
#include "jsrcert/jsr_bounds.hpp"
#include "jsrcert/matrix_set_io.hpp"
#include "jsrcert/parallel.hpp"
#include "jsrcert/polytope.hpp"
#include "jsrcert/quadratic.hpp"
#include "jsrcert/sos.hpp"

namespace jsrcert::cli {

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
};

int exit_for(Feasibility f) {
  switch (f) {
    case Feasibility::kFeasible: return kOk;
    case Feasibility::kInfeasible: return kNone;
    case Feasibility::kUndetermined: return kUndetermined;
  }
  return kUndetermined;
}

void require_json(const Common& c, const char* command) {
  if (c.format != "json") throw UsageError(std::string(command) + " only writes JSON");
}

std::optional<int> k_from_label(const std::string& label) {
  static const std::regex re("k=([0-9]+)");
  std::smatch m;
  if (std::regex_search(label, m, re)) return std::stoi(m[1].str());
  return std::nullopt;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

json margin_json(const std::optional<double>& m) { return m ? json(*m) : json(nullptr); }

json word_json(const Word& w) { return json(w); }

// Aggregate exit code for a set of searches: all found -> 0, any undecided
// miss -> 3, otherwise 1.
int aggregate(bool all_found, bool any_undetermined_miss) {
  if (all_found) return kOk;
  return any_undetermined_miss ? kUndetermined : kNone;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint spectral radius bounds and stability certificates for switched linear systems",
               "jsr-certify"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", common.seed, "Seed for randomized validation points (default 42)");
  app.add_option("--out", common.out_path, "Write results to FILE instead of stdout");

  // family gen
  auto* family = app.add_subcommand("family", "Matrix family generators")->require_subcommand(1);
  family->fallthrough();
  auto* family_gen = family->add_subcommand("gen", "Write a matrix set as JSON");
  family_gen->fallthrough();
  std::string fam_name;
  int fam_k = 2;
  std::optional<double> fam_alpha;
  std::string fam_branch = "stable";
  bool fam_scaled = false;
  family_gen->add_option("--family", fam_name, "kozyakin | blondel | lw | lw-exp")->required();
  family_gen->add_option("--k", fam_k, "Family index k");
  family_gen->add_option("--alpha", fam_alpha,
                         "Family parameter. blondel accepts 0 < alpha < 0.7493265463303676 (the "
                         "critical constant rounded to the nearest double; the exact constant "
                         "lies within half an ulp)");
  family_gen->add_option("--branch", fam_branch, "kozyakin branch")
      ->check(CLI::IsMember({"stable", "unstable"}));
  family_gen->add_flag("--scaled", fam_scaled, "lw: multiply by (1 - 1/k)");

  // jsr bracket
  auto* jsr = app.add_subcommand("jsr", "Joint spectral radius bounds")->require_subcommand(1);
  jsr->fallthrough();
  auto* bracket = jsr->add_subcommand("bracket", "Lower and upper JSR bounds");
  bracket->fallthrough();
  std::string in_path;
  int depth = 0;
  std::optional<double> delta;
  std::optional<std::int64_t> budget;
  bracket->add_option("--in", in_path, "Matrix set JSON")->required();
  bracket->add_option("--depth", depth, "Maximum word length")->required()->check(CLI::PositiveNumber);
  bracket->add_option("--delta", delta, "Use branch and bound with this target gap");
  bracket->add_option("--budget", budget, "Maximum number of products");

  // certify
  auto* certify = app.add_subcommand("certify", "Search for a stability certificate")->require_subcommand(1);
  certify->fallthrough();
  double gamma = 1.0;
  std::string validate_only;
  auto* c_sos = certify->add_subcommand("sos", "SOS polynomial Lyapunov function");
  auto* c_quad = certify->add_subcommand("quad", "Quadratic / piecewise quadratic Lyapunov function");
  auto* c_poly = certify->add_subcommand("polytope", "Polytopic Lyapunov function (n = 2)");
  for (auto* sc : {c_sos, c_quad, c_poly}) {
    sc->fallthrough();
    sc->add_option("--in", in_path, "Matrix set JSON");
    sc->add_option("--gamma", gamma, "Contraction factor")->check(CLI::PositiveNumber);
    sc->add_option("--validate-only", validate_only, "Re-validate CERT.json without solving");
  }
  int degree = 0;
  c_sos->add_option("--degree", degree, "Even polynomial degree");
  std::string quad_kind = "cqlf";
  int order = 1;
  c_quad->add_option("--kind", quad_kind, "cqlf | maxq | minq")
      ->check(CLI::IsMember({"cqlf", "maxq", "minq"}));
  c_quad->add_option("--order", order, "De Bruijn order l")->check(CLI::PositiveNumber);
  int max_vertices = 200;
  std::string init = "eig";
  c_poly->add_option("--max-vertices", max_vertices, "Vertex cap");
  c_poly->add_option("--init", init, "eig | square")->check(CLI::IsMember({"eig", "square"}));

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Certificate-size sweeps")->require_subcommand(1);
  sweep->fallthrough();
  auto* s_deg = sweep->add_subcommand("min-degree", "Smallest SOS Lyapunov degree");
  auto* s_pieces = sweep->add_subcommand("pieces", "Smallest De Bruijn order");
  int dmax = 24;
  int lmax = 4;
  std::string pieces_kind = "maxq";
  for (auto* sc : {s_deg, s_pieces}) {
    sc->fallthrough();
    sc->add_option("--in", in_path, "Matrix set JSON")->required();
    sc->add_option("--gamma", gamma, "Contraction factor")->check(CLI::PositiveNumber);
  }
  s_deg->add_option("--dmax", dmax, "Largest degree tried (even)");
  s_pieces->add_option("--kind", pieces_kind, "cqlf | maxq | minq")
      ->check(CLI::IsMember({"cqlf", "maxq", "minq"}));
  s_pieces->add_option("--lmax", lmax, "Largest order tried")->check(CLI::PositiveNumber);

  // table
  auto* table = app.add_subcommand("table", "Experiment tables")->require_subcommand(1);
  table->fallthrough();
  auto* sec5 = table->add_subcommand("sec5", "Minimum SOS degree on the scaled Lagarias-Wang family");
  sec5->fallthrough();
  int kmin = 2;
  int kmax = 4;
  sec5->add_option("--kmin", kmin, "First k (>= 2)");
  sec5->add_option("--kmax", kmax, "Last k")->required();
  sec5->add_option("--dmax", dmax, "Largest degree tried per row (even)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::ostringstream buf;
  int code = kOk;
  auto load = [&]() {
    if (in_path.empty()) throw UsageError("--in is required");
    return load_matrix_set(in_path);
  };

  try {
    if (family_gen->parsed()) {
      require_json(common, "family gen");
      FamilySpec spec;
      const auto f = parse_family(fam_name);
      if (!f) throw UsageError("unknown family '" + fam_name + "'");
      spec.family = *f;
      spec.k = fam_k;
      spec.alpha = fam_alpha;
      spec.branch = fam_branch == "stable" ? Branch::kStable : Branch::kUnstable;
      spec.scaled = fam_scaled;
      try {
        buf << dump_matrix_set(make_family(spec));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    } else if (bracket->parsed()) {
      require_json(common, "jsr bracket");
      const MatrixSet set = load();
      JsrBracket b;
      json j;
      if (delta) {
        GripenbergOptions opt;
        opt.delta = *delta;
        opt.max_depth = depth;
        if (budget) opt.budget = *budget;
        b = gripenberg(set, opt);
        j["method"] = "branch_and_bound";
        j["converged"] = b.converged;
        j["pruned_count"] = b.pruned_count;
      } else {
        b = exhaustive_bracket(set, depth, budget.value_or(kDefaultProductBudget));
        j["method"] = "exhaustive";
        j["truncated"] = b.depth < depth;
      }
      j["lower"] = b.lower;
      j["upper"] = b.upper;
      j["witness_word"] = word_json(b.lower_witness.word);
      j["depth"] = b.depth;
      j["products"] = b.products;
      buf << j.dump(2) << "\n";
    } else if (certify->parsed()) {
      require_json(common, "certify");
      if (!validate_only.empty()) {
        const Certificate cert = load_certificate(validate_only);
        const Revalidation r = revalidate(cert, common.seed);
        json j{{"kind", r.kind}, {"valid", r.valid}};
        if (!r.valid) j["reason"] = r.reason;
        buf << j.dump(2) << "\n";
        code = r.valid ? kOk : kNone;
      } else if (c_sos->parsed()) {
        if (degree < 2 || degree % 2 != 0) throw UsageError("--degree must be even and >= 2");
        const MatrixSet set = load();
        SosOptions opt;
        opt.seed = common.seed;
        const SosResult r = sos_lyapunov_feasible(set, degree, gamma, opt);
        code = exit_for(r.status);
        if (r.certificate) {
          buf << dump_certificate(Certificate{*r.certificate, set});
        } else {
          json j{{"status", to_string(r.status)}, {"degree", degree}, {"gamma", gamma},
                 {"margin", margin_json(r.margin)}, {"solver_status", conic::to_string(r.solver_status)}};
          if (!r.note.empty()) j["note"] = r.note;
          buf << j.dump(2) << "\n";
        }
      } else if (c_quad->parsed()) {
        const MatrixSet set = load();
        QuadOptions opt;
        opt.seed = common.seed;
        const QuadKind kind = *parse_quad_kind(quad_kind);
        QuadResult r;
        try {
          r = quadratic_certificate(set, kind, order, gamma, opt);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        code = exit_for(r.status);
        if (r.certificate) {
          buf << dump_certificate(Certificate{*r.certificate, set});
        } else {
          json j{{"status", to_string(r.status)}, {"kind", quad_kind}, {"order", order},
                 {"gamma", gamma}, {"margin", margin_json(r.margin)}};
          if (!r.note.empty()) j["note"] = r.note;
          buf << j.dump(2) << "\n";
        }
      } else if (c_poly->parsed()) {
        const MatrixSet set = load();
        if (set.dim() != 2) throw UsageError("certify polytope needs a 2x2 matrix set");
        const PolytopeResult r =
            invariant_polytope_iterate(set, gamma, max_vertices, *parse_polytope_init(init));
        if (r.certificate) {
          buf << dump_certificate(Certificate{*r.certificate, set});
        } else {
          code = kNone;
          json j{{"status", "none"},
                 {"gamma", gamma},
                 {"failure", r.failure},
                 {"vertex_count", r.vertex_count},
                 {"vertex_trajectory", r.vertex_trajectory}};
          buf << j.dump(2) << "\n";
        }
      }
    } else if (s_deg->parsed()) {
      if (dmax < 2 || dmax % 2 != 0) throw UsageError("--dmax must be even and >= 2");
      const MatrixSet set = load();
      SosOptions opt;
      opt.seed = common.seed;
      const MinDegreeReport rep = min_sos_degree(set, dmax, gamma, opt);
      const auto k = k_from_label(set.label());
      code = aggregate(rep.min_degree.has_value(), rep.any_undetermined());
      if (common.format == "csv") {
        buf << "label,k,min_degree,status_per_degree\n"
            << csv_field(set.label()) << ',' << (k ? std::to_string(*k) : "") << ','
            << (rep.min_degree ? std::to_string(*rep.min_degree) : "none") << ','
            << rep.status_string() << "\n";
      } else {
        json per = json::array();
        for (const DegreeStatus& s : rep.per_degree) {
          per.push_back({{"degree", s.degree}, {"status", to_string(s.status)}, {"margin", margin_json(s.margin)}});
        }
        json j{{"label", set.label()},
               {"k", k ? json(*k) : json(nullptr)},
               {"min_degree", rep.min_degree ? json(*rep.min_degree) : json(nullptr)},
               {"per_degree", per}};
        buf << j.dump(2) << "\n";
      }
    } else if (s_pieces->parsed()) {
      const MatrixSet set = load();
      QuadOptions opt;
      opt.seed = common.seed;
      const PiecesReport rep = sweep_pieces(set, *parse_quad_kind(pieces_kind), lmax, gamma, true, opt);
      bool undetermined = false;
      for (const OrderStatus& s : rep.per_order) undetermined |= s.status == Feasibility::kUndetermined;
      code = aggregate(rep.min_order.has_value(), undetermined);
      if (common.format == "csv") {
        buf << "label,kind,order,pieces,status,margin\n";
        for (const OrderStatus& s : rep.per_order) {
          buf << csv_field(set.label()) << ',' << pieces_kind << ',' << s.order << ',' << s.pieces << ','
              << to_string(s.status) << ',' << (s.margin ? num(*s.margin) : "") << "\n";
        }
      } else {
        json per = json::array();
        for (const OrderStatus& s : rep.per_order) {
          json e{{"order", s.order}, {"pieces", s.pieces}, {"status", to_string(s.status)},
                 {"margin", margin_json(s.margin)}};
          if (!s.note.empty()) e["note"] = s.note;
          per.push_back(e);
        }
        json j{{"label", set.label()},
               {"kind", pieces_kind},
               {"min_order", rep.min_order ? json(*rep.min_order) : json(nullptr)},
               {"min_pieces", rep.min_pieces ? json(*rep.min_pieces) : json(nullptr)},
               {"per_order", per}};
        buf << j.dump(2) << "\n";
      }
    } else if (sec5->parsed()) {
      if (kmin < 2 || kmax < kmin) throw UsageError("need 2 <= kmin <= kmax");
      if (dmax < 2 || dmax % 2 != 0) throw UsageError("--dmax must be even and >= 2");
      SosOptions opt;
      opt.seed = common.seed;
      const auto rows = parallel_map(static_cast<std::size_t>(kmax - kmin + 1), [&](std::size_t i) {
        const int k = kmin + static_cast<int>(i);
        return min_sos_degree(lagarias_wang_experiment(k), dmax, 1.0, opt);
      });
      bool all_found = true;
      bool undetermined_miss = false;
      for (const MinDegreeReport& r : rows) {
        if (!r.min_degree) {
          all_found = false;
          undetermined_miss |= r.any_undetermined();
        }
      }
      code = aggregate(all_found, undetermined_miss);
      if (common.format == "csv") {
        buf << "k,alpha,scale,min_degree,status_per_degree\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const int k = kmin + static_cast<int>(i);
          buf << k << ',' << num(lagarias_wang_midpoint(k)) << ',' << num(lagarias_wang_experiment_scale(k))
              << ',' << (rows[i].min_degree ? std::to_string(*rows[i].min_degree) : "none") << ','
              << rows[i].status_string() << "\n";
        }
      } else {
        json arr = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const int k = kmin + static_cast<int>(i);
          json per = json::array();
          for (const DegreeStatus& s : rows[i].per_degree) {
            per.push_back({{"degree", s.degree}, {"status", to_string(s.status)}, {"margin", margin_json(s.margin)}});
          }
          arr.push_back({{"k", k},
                         {"alpha", lagarias_wang_midpoint(k)},
                         {"scale", lagarias_wang_experiment_scale(k)},
                         {"min_degree", rows[i].min_degree ? json(*rows[i].min_degree) : json(nullptr)},
                         {"status_per_degree", per}});
        }
        buf << arr.dump(2) << "\n";
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "error: malformed input at " << (e.where().empty() ? "/" : e.where()) << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUndetermined;
  }

  if (!common.out_path.empty()) {
    std::ofstream f(common.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << common.out_path << "\n";
      return kUsage;
    }
    f << buf.str();
  } else {
    out << buf.str();
  }
  return code;
}

}  // namespace jsrcert::cli
