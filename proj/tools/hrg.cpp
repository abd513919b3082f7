// Command-line front end: sample the point process, build the distance graph,
// evaluate the limit constants, and run Monte Carlo experiment configs.
//
// Exit codes: 0 ok, 2 usage/parameter error, 3 I/O failure, 4 invariant breach.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hrg/experiments.hpp"
#include "hrg/experiments_io.hpp"
#include "hrg/graph.hpp"
#include "hrg/measures.hpp"
#include "hrg/model.hpp"
#include "hrg/sampler.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kInvariant = 4;

using hrg::json;

void write_pointset_sidecar(const hrg::PointSet& ps, const std::string& path) {
    json j;
    j["alpha"] = ps.params.alpha;
    j["nu"] = ps.params.nu;
    j["n"] = ps.params.n;
    j["seed"] = ps.seed;
    j["N"] = ps.size();
    j["R"] = ps.params.R;
    j["H"] = ps.params.H;
    j["process"] = ps.process_kind == hrg::ProcessKind::ExactDisc ? "disc" : "band";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

hrg::PointSet load_pointset(const std::string& csv_path) {
    std::ifstream side(csv_path + ".json");
    if (!side) throw std::runtime_error("missing sidecar " + csv_path + ".json");
    json j;
    side >> j;
    hrg::PointSet ps;
    ps.params = hrg::make_params(j.at("alpha").get<double>(), j.at("nu").get<double>(),
                                 j.at("n").get<double>());
    ps.seed = j.value("seed", std::uint64_t{0});
    ps.process_kind = j.value("process", std::string("disc")) == "band"
                          ? hrg::ProcessKind::IdealBand
                          : hrg::ProcessKind::ExactDisc;
    hrg::read_points_csv(csv_path, ps);
    return ps;
}

int cmd_generate(double alpha, double nu, double n, std::uint64_t seed,
                 const std::string& out) {
    hrg::PointSet ps;
    try {
        ps = hrg::sample_disc(hrg::make_params(alpha, nu, n), seed);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "generate: %s\n", e.what());
        return kUsage;
    }
    try {
        hrg::write_points_csv(ps, out);
        write_pointset_sidecar(ps, out + ".json");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "generate: %s\n", e.what());
        return kIo;
    }
    json summary;
    summary["N"] = ps.size();
    summary["R"] = ps.params.R;
    summary["H"] = ps.params.H;
    std::printf("%s\n", summary.dump().c_str());
    return kOk;
}

int cmd_graph(const std::string& in, const std::string& out, const std::string& builder,
              bool verify) {
    hrg::PointSet ps;
    try {
        ps = load_pointset(in);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "graph: %s\n", e.what());
        return kIo;
    }
    try {
        const hrg::HrgGraph g =
            builder == "brute" ? hrg::build_bruteforce(ps) : hrg::build_fast(ps);
        if (verify) {
            if (ps.size() > 20000) {
                std::fprintf(stderr, "graph: --verify is guarded to 2e4 points\n");
                return kUsage;
            }
            const hrg::HrgGraph other =
                builder == "brute" ? hrg::build_fast(ps) : hrg::build_bruteforce(ps);
            for (std::size_t i = 0; i < g.n_vertices; ++i)
                if (g.adjacency[i] != other.adjacency[i]) {
                    std::fprintf(stderr, "graph: builder mismatch at vertex %zu\n", i);
                    return kInvariant;
                }
        }
        hrg::write_edge_list(g, ps, out);
        std::size_t edges = 0;
        for (auto d : g.degrees) edges += d;
        json summary;
        summary["n_vertices"] = g.n_vertices;
        summary["n_edges"] = edges / 2;
        std::printf("%s\n", summary.dump().c_str());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "graph: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "graph: %s\n", e.what());
        return kIo;
    }
    return kOk;
}

int cmd_constants(double alpha, double nu, bool with_sigma2, double ycut, double zcut) {
    try {
        // the constants do not depend on n; any valid scale works
        const hrg::ModelParams p = hrg::make_params(alpha, nu, std::max(1e6, 1e4 * nu));
        json out;
        out["alpha"] = alpha;
        out["nu"] = nu;
        out["gamma"] = p.gamma;
        out["iso_constant"] = hrg::iso_expectation_constant(p);
        out["ext_constant"] = hrg::ext_expectation_constant(p);
        if (with_sigma2) {
            const hrg::SigmaResult s =
                hrg::sigma_ext_constant(p, ycut, zcut, hrg::QuadratureSpec{1e-7, 1e-11, 40});
            out["sigma2"] = s.sigma2;
            out["truncation_report"] = {{"y_cut", s.trunc.y_cut},
                                        {"z_cut", s.trunc.z_cut},
                                        {"first_tail_bound", s.trunc.first_tail_bound},
                                        {"pair_tail_bound", s.trunc.pair_tail_bound}};
        }
        std::printf("%s\n", out.dump(2).c_str());
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "constants: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "constants: %s\n", e.what());
        return kIo;
    }
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   int threads) {
    hrg::ExperimentConfig cfg;
    try {
        cfg = hrg::load_config(config_path);
        if (threads > 0) cfg.threads = threads;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "experiment: %s\n", e.what());
        return kUsage;
    }
    try {
        std::filesystem::create_directories(out_dir);
        const std::string csv = out_dir + "/counts.csv";
        const std::string rep = out_dir + "/report.json";
        // run cell by cell, flushing rows as they complete; an interrupted run
        // leaves the finished cells behind under the .partial marker
        hrg::validate(cfg);
        std::vector<hrg::CountRow> rows;
        for (double alpha : cfg.alphas)
            for (double n : cfg.n_grid) {
                auto cell_rows = hrg::run_cell(alpha, cfg.nu, n, cfg.replicates,
                                               cfg.master_seed, cfg.threads);
                rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
                hrg::write_counts_csv(rows, csv + ".partial", cfg.conditioning, 0.0,
                                      cfg.nu, cfg.conditioning_height);
            }
        const json report = hrg::build_report(cfg, rows);
        std::ofstream out(rep + ".partial");
        if (!out) throw std::runtime_error("cannot write " + rep);
        out << report.dump(2) << "\n";
        out.close();
        std::filesystem::rename(csv + ".partial", csv);
        std::filesystem::rename(rep + ".partial", rep);
        std::printf("{\"counts\": \"%s\", \"report\": \"%s\", \"rows\": %zu}\n",
                    csv.c_str(), rep.c_str(), rows.size());
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "experiment: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "experiment: %s\n", e.what());
        return kIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic random geometric graphs: sampling, graphs, constants, experiments"};
    app.require_subcommand(1);

    double alpha = 1.0, nu = 1.0, n = 0.0;
    std::uint64_t seed = 1;
    std::string out, in, builder = "fast", config_path, out_dir = ".";
    bool verify = false, with_sigma2 = false;
    double ycut = 30.0, zcut = -1.0;
    int threads = 0;

    auto* gen = app.add_subcommand("generate", "sample the disc point process to CSV");
    gen->add_option("--alpha", alpha)->required();
    gen->add_option("--nu", nu)->required();
    gen->add_option("--n", n)->required();
    gen->add_option("--seed", seed)->required();
    gen->add_option("--out", out)->required();

    auto* gr = app.add_subcommand("graph", "build the distance-R graph from a point CSV");
    gr->add_option("--in", in)->required();
    gr->add_option("--out", out)->required();
    gr->add_option("--builder", builder)->check(CLI::IsMember({"fast", "brute"}));
    gr->add_flag("--verify", verify, "cross-check fast against brute force");

    auto* co = app.add_subcommand("constants", "print the limit constants as JSON");
    co->add_option("--alpha", alpha)->required();
    co->add_option("--nu", nu)->required();
    co->add_flag("--sigma2", with_sigma2, "also evaluate the extreme-count variance constant");
    co->add_option("--ycut", ycut);
    co->add_option("--zcut", zcut);

    auto* ex = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
    ex->add_option("--config", config_path)->required();
    ex->add_option("--out-dir", out_dir);
    ex->add_option("--threads", threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (gen->parsed()) return cmd_generate(alpha, nu, n, seed, out);
    if (gr->parsed()) return cmd_graph(in, out, builder, verify);
    if (co->parsed()) return cmd_constants(alpha, nu, with_sigma2, ycut, zcut);
    if (ex->parsed()) return cmd_experiment(config_path, out_dir, threads);
    return kUsage;
}
