#include "cli.hpp"

#include "boxbp/harness.hpp"
#include "boxbp/io.hpp"
#include "boxbp/nsp.hpp"
#include "boxbp/solver.hpp"
#include "boxbp/statdim.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <optional>
#include <ostream>
#include <sstream>

namespace boxbp::cli {

namespace {

using nlohmann::ordered_json;

struct Emitter {
    std::ostream& out;
    std::string path;

    void operator()(const std::string& text) const {
        if (path.empty()) {
            out << text;
            if (!text.empty() && text.back() != '\n') out << '\n';
        } else {
            io::write_text(path, text.back() == '\n' ? text : text + "\n");
        }
    }
};

std::vector<int> parse_ints(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
        }
        if (used != item.size()) throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty ") + what);
    return out;
}

ordered_json result_json(const SolveResult& r) {
    ordered_json j;
    j["status"] = to_string(r.status);
    j["objective"] = r.objective;
    j["equality_residual"] = r.equality_residual;
    j["unique"] = to_string(r.unique);
    j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
    return j;
}

struct SolveArgs {
    std::string matrix, rhs, alphabet = "0:1", out;
    bool p1 = false, pplus = false, certify = false, round = false;
    double eta = 0.0;
};

void add_solve_options(CLI::App* sc, SolveArgs& a, bool denoise) {
    sc->add_option("--matrix", a.matrix, "Measurement matrix (CSV or JSON)")->required();
    sc->add_option("--rhs", a.rhs, "Right-hand side vector (CSV or JSON)")->required();
    sc->add_option("--alphabet", a.alphabet, "Integer alphabet LO:HI")->capture_default_str();
    auto* p1 = sc->add_flag("--p1", a.p1, "Plain l1 minimization, no box");
    auto* pp = sc->add_flag("--pplus", a.pplus, "l1 minimization over x >= 0");
    p1->excludes(pp);
    sc->add_option("--out", a.out, "Write the result JSON here instead of stdout");
    if (denoise) {
        sc->add_option("--eta", a.eta, "Noise level")->required()->check(CLI::NonNegativeNumber);
        sc->add_flag("--round", a.round, "Round the estimate to the alphabet");
    } else {
        sc->add_flag("--certify", a.certify, "Certify uniqueness of the minimizer");
    }
}

int do_solve(const SolveArgs& a, bool denoise, std::ostream& out) {
    const Matrix A = io::read_matrix(a.matrix);
    const Vector b = io::read_vector(a.rhs);
    const Alphabet alphabet = Alphabet::parse(a.alphabet);
    Box box = box_for(alphabet, A.cols());
    if (a.p1) box = Box::unbounded(A.cols());
    if (a.pplus) box = Box::nonnegative(A.cols());

    SolveResult r;
    if (denoise) {
        r = solve_box_bp_denoise(A, b, a.eta, box);
    } else if (!a.p1 && !a.pplus) {
        r = solve_alphabet(A, b, alphabet, a.certify);
    } else {
        r = solve_box_bp(A, b, box, a.certify);
    }
    ordered_json j = result_json(r);
    if (denoise) {
        j["eta"] = a.eta;
        if (a.round && r.optimal()) {
            const Vector xr = round_to_alphabet(r.x, alphabet);
            j["rounded"] = std::vector<double>(xr.data(), xr.data() + xr.size());
        }
    }
    Emitter{out, a.out}(j.dump(2));
    return r.optimal() ? kExitOk : kExitNotOptimal;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Box-constrained basis pursuit for finite-valued sparse signals", "boxbp"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    int jobs = 1;
    app.add_option("--seed", seed, "Seed for every randomized path (default 0)");
    app.add_option("--jobs", jobs, "Worker threads for grids and crosschecks")->check(CLI::PositiveNumber);

    SolveArgs solve_args, denoise_args;
    auto* solve = app.add_subcommand("solve", "Solve the box program for Ax = b");
    add_solve_options(solve, solve_args, false);
    auto* denoise = app.add_subcommand("denoise", "Solve the box program for ||Ax - b|| <= eta");
    add_solve_options(denoise, denoise_args, true);

    std::string variant, counts;
    int N = 0;
    long mc_samples = 0;
    auto* statdim = app.add_subcommand("statdim", "Phase-transition value Delta and its minimizer tau*");
    statdim->add_option("--variant", variant, "bin|ter|uf|bf|pplus")->required();
    statdim->add_option("--N", N, "Signal length")->required();
    statdim->add_option("--counts", counts, "k, or k_hat,k_L (uf), or k_hat,k_neg,k_pos[,k_zero] (bf)")->required();
    statdim->add_option("--mc", mc_samples, "Also estimate J(tau*) by Monte Carlo with this many samples");

    std::string curve_variant, curve_out;
    int curve_N = 1000;
    double level_ratio = 0.0;
    auto* curve = app.add_subcommand("curve", "Theory overlay Delta/N against k/N");
    curve->add_option("--variant", curve_variant, "bin|ter|uf|bf|pplus")->required();
    curve->add_option("--N", curve_N, "Signal length")->capture_default_str();
    curve->add_option("--level-ratio", level_ratio, "k_hat / k for uf and bf")->capture_default_str();
    curve->add_option("--out", curve_out, "Write CSV here instead of stdout");

    std::string nsp_kind, nsp_matrix, nsp_sets;
    auto* nsp = app.add_subcommand("nsp", "Check a null space property");
    nsp->add_option("--kind", nsp_kind, "bnsp|nspplus|btnsp|ufnsp|fnsp")->required();
    nsp->add_option("--matrix", nsp_matrix, "Matrix (CSV or JSON)")->required();
    nsp->add_option("--sets", nsp_sets, "1-based index sets, groups separated by ';'")->required();

    std::string grid_config, grid_out, grid_transitions;
    std::string robust_config, robust_out, robust_transitions;
    auto* phase = app.add_subcommand("phase", "Noiseless phase-transition grid");
    phase->add_option("--config", grid_config, "Grid config JSON")->required();
    phase->add_option("--out", grid_out, "Write the grid CSV here instead of stdout");
    phase->add_option("--transitions", grid_transitions, "Also write the 50% transition per k");
    auto* robust = app.add_subcommand("robust", "Noisy recovery grid");
    robust->add_option("--config", robust_config, "Grid config JSON")->required();
    robust->add_option("--out", robust_out, "Write the grid CSV here instead of stdout");
    robust->add_option("--transitions", robust_transitions, "Also write the 50% transition per k");

    int cc_trials = 500;
    std::string cc_dims, cc_out;
    auto* crosscheck = app.add_subcommand("crosscheck", "Compare NSP checkers with uniqueness certificates");
    crosscheck->add_option("--trials", cc_trials, "Random instances")->capture_default_str()->check(CLI::NonNegativeNumber);
    crosscheck->add_option("--dims", cc_dims, "m,N,k (k = 0 draws the support size per trial)")->required();
    crosscheck->add_option("--out", cc_out, "Write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*solve) return do_solve(solve_args, false, out);
        if (*denoise) return do_solve(denoise_args, true, out);
        if (*statdim) {
            const CurveSpec spec = CurveSpec::from_counts(parse_curve_variant(variant), N, parse_ints(counts, "counts"));
            const DeltaResult d = delta_curve(spec);
            ordered_json j;
            j["variant"] = to_string(spec.variant);
            j["N"] = spec.N;
            j["counts"] = spec.counts_string();
            j["delta"] = d.delta;
            j["tau_star"] = d.tau_star;
            j["delta_over_N"] = d.delta / spec.N;
            if (mc_samples > 0) {
                const McEstimate e = mc_statdim_oracle(Rng(seed), spec, d.tau_star, mc_samples, jobs);
                j["mc_mean"] = e.mean;
                j["mc_std_error"] = e.std_error;
                j["seed"] = seed;
            }
            out << j.dump() << "\n";
            return kExitOk;
        }
        if (*curve) {
            Emitter{out, curve_out}(emit_theory_overlay(parse_curve_variant(curve_variant), curve_N, level_ratio));
            return kExitOk;
        }
        if (*nsp) {
            const Matrix A = io::read_matrix(nsp_matrix);
            const NspQuery q = NspQuery::parse(parse_nsp_kind(nsp_kind), nsp_sets);
            const NspVerdict v = check_nsp(A, q);
            out << verdict_json(v, q, A.rows(), A.cols()) << "\n";
            return v.holds ? kExitOk : kExitNspFails;
        }
        if (*phase || *robust) {
            const bool is_phase = static_cast<bool>(*phase);
            PhaseGridConfig cfg = PhaseGridConfig::from_json(io::read_text(is_phase ? grid_config : robust_config));
            if (app.count("--seed")) cfg.seed = seed;
            const PhaseTable t = is_phase ? run_phase_grid(cfg, jobs) : run_robustness_grid(cfg, jobs);
            Emitter{out, is_phase ? grid_out : robust_out}(t.to_csv());
            const std::string& tpath = is_phase ? grid_transitions : robust_transitions;
            if (!tpath.empty()) io::write_text(tpath, transition_csv(empirical_transition_location(t)));
            return kExitOk;
        }
        if (*crosscheck) {
            const auto dims = parse_ints(cc_dims, "dims");
            if (dims.size() != 3) throw std::invalid_argument("--dims expects m,N,k");
            const CrosscheckReport rep = nsp_recovery_crosscheck(Rng(seed), cc_trials, dims[0], dims[1], dims[2], jobs);
            Emitter{out, cc_out}(rep.to_json());
            return kExitOk;
        }
    } catch (const io::ParseError& e) {
        err << "boxbp: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const io::FileError& e) {
        err << "boxbp: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        err << "boxbp: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const ComplexityRefused& e) {
        err << "boxbp: refused: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "boxbp: error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace boxbp::cli
