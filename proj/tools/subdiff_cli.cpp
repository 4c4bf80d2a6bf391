// Command-line front end: every experiment writes CSV to --out or stdout.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <subdiff/subdiff.hpp>

namespace fs = std::filesystem;
using namespace subdiff;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kGraph = 4, kNumerical = 5 };

struct Options {
    std::vector<double> alpha;
    std::vector<double> epsilon;
    std::vector<int> j;
    std::optional<double> t_lo, t_hi;
    std::optional<int> t_steps;
    std::string graph_file;
    std::vector<long long> er;
    std::optional<int> gabriel;
    std::uint64_t seed = 7;
    std::optional<int> src, dst;
    std::string out;
    bool full = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--alpha", o.alpha, "Fractional order(s), comma separated")->delimiter(',');
    cmd->add_option("--epsilon", o.epsilon, "Window tail tolerance(s), comma separated")->delimiter(',');
    cmd->add_option("--j", o.j, "SOE node count(s), comma separated")->delimiter(',');
    cmd->add_option("--t-lo", o.t_lo, "Smallest time of the log grid");
    cmd->add_option("--t-hi", o.t_hi, "Largest time of the log grid");
    cmd->add_option("--t-steps", o.t_steps, "Number of log-spaced times");
    auto* gf = cmd->add_option("--graph", o.graph_file, "Edge-list file ('u v' per line)");
    auto* ge = cmd->add_option("--er", o.er, "Erdos-Renyi graph: n m")->expected(2);
    auto* gg = cmd->add_option("--gabriel", o.gabriel, "Gabriel graph on n random points");
    gf->excludes(ge)->excludes(gg);
    ge->excludes(gg);
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--src", o.src, "Source vertex");
    cmd->add_option("--dst", o.dst, "Destination vertex");
    cmd->add_option("--out", o.out, "Output file (directory for paths); stdout when omitted");
    cmd->add_flag("--full", o.full, "Full-scale sizes instead of the reduced defaults");
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> def) {
    return v.empty() ? def : v;
}

enum class DefaultGraph { ER250, Gabriel, ER40 };

Graph load_graph(const Options& o, DefaultGraph def) {
    if (!o.graph_file.empty()) return read_edge_list(o.graph_file);
    if (!o.er.empty()) return gen_erdos_renyi(static_cast<int>(o.er[0]), o.er[1], o.seed, true);
    if (o.gabriel) return gen_gabriel(*o.gabriel, o.seed);
    switch (def) {
        case DefaultGraph::ER250: return gen_erdos_renyi(250, 1000, o.seed, true);
        case DefaultGraph::ER40: return gen_erdos_renyi(40, 100, o.seed, true);
        default: return gen_gabriel(o.full ? 600 : 120, o.seed);
    }
}

std::vector<double> times(const Options& o, double lo, double hi, int steps) {
    return log_grid(o.t_lo.value_or(lo), o.t_hi.value_or(hi), o.t_steps.value_or(steps));
}

void emit(const CsvTable& t, const Options& o) {
    if (o.out.empty()) std::cout << t.str();
    else t.save(o.out);
}

double single_alpha(const Options& o, double def) {
    if (o.alpha.size() > 1) throw ParameterError("this command takes a single --alpha");
    return o.alpha.empty() ? def : o.alpha.front();
}

double single_epsilon(const Options& o) {
    if (o.epsilon.size() > 1) throw ParameterError("this command takes a single --epsilon");
    return o.epsilon.empty() ? 1e-12 : o.epsilon.front();
}

// Default endpoints: leftmost and rightmost points when coordinates exist,
// otherwise 0 and the vertex farthest from 0 in hops.
std::pair<int, int> endpoints(const Graph& g, const Options& o) {
    int s = 0, d = g.n() - 1;
    if (g.coords()) {
        const auto& c = *g.coords();
        for (int v = 0; v < g.n(); ++v) {
            if (c[v][0] < c[s][0]) s = v;
            if (c[v][0] > c[d][0]) d = v;
        }
    } else {
        const auto dist = g.bfs_distances(0);
        d = static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    }
    return {o.src.value_or(s), o.dst.value_or(d)};
}

std::vector<int> even_range(int lo, int hi, int step) {
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

int run_gen_graph(const Options& o) {
    if (o.er.empty() && !o.gabriel) throw ParameterError("gen-graph needs --er n m or --gabriel n");
    const Graph g = load_graph(o, DefaultGraph::ER250);
    if (o.out.empty()) {
        for (const auto& [u, v] : g.edges()) std::cout << u << ' ' << v << '\n';
    } else {
        write_edge_list(g, o.out);
    }
    std::cerr << "vertices " << g.n() << ", edges " << g.edge_count() << '\n';
    return kOk;
}

int run_window_table(const Options& o) {
    emit(window_table(or_default(o.alpha, {0.2, 0.3, 0.5, 0.7, 0.8}), or_default(o.epsilon, {1e-6, 1e-8, 1e-10, 1e-12})),
         o);
    return kOk;
}

int run_soe_table(const Options& o) {
    if (o.j.size() > 1) throw ParameterError("soe-table takes a single --j");
    emit(soe_table(single_alpha(o, 0.85), single_epsilon(o), o.j.empty() ? 111 : o.j.front()), o);
    return kOk;
}

int run_error_heatmap(const Options& o) {
    const Graph g = load_graph(o, DefaultGraph::ER250);
    const auto spec = laplacian(g);
    const auto ts = times(o, 11.0, 1001.0, o.full ? 300 : 10);
    const auto js = or_default(o.j, o.full ? even_range(2, 120, 2) : even_range(10, 120, 10));
    emit(error_heatmap(spec, or_default(o.alpha, {0.25, 0.5, 0.8}), ts, js, single_epsilon(o)), o);
    return kOk;
}

int run_survival(const Options& o) {
    if (o.j.size() > 1) throw ParameterError("survival takes a single --j");
    emit(survival_table(or_default(o.alpha, {0.8, 0.5, 0.25}), {1, 2, 4}, times(o, 1e-2, 1e3, 51),
                        single_epsilon(o), o.j.empty() ? 61 : o.j.front()),
         o);
    return kOk;
}

int run_paths(const Options& o) {
    const Graph g = load_graph(o, DefaultGraph::Gabriel);
    const auto spec = laplacian(g);
    const double alpha = single_alpha(o, 0.85);
    const auto [src, dst] = endpoints(g, o);
    std::vector<PathSource> sources;
    for (int J : or_default(o.j, {1, 10, 20, 40})) sources.push_back({"J" + std::to_string(J), J});
    sources.push_back({"exact", 0});
    const auto runs = run_paths(g, spec, alpha, sources, times(o, 0.1, 1000.0, 300), src, dst, single_epsilon(o));
    const fs::path dir = o.out.empty() ? fs::path("paths_out") : fs::path(o.out);
    fs::create_directories(dir);
    for (const auto& [label, e] : runs) {
        path_records_csv(e).save(dir / ("paths_" + label + ".csv"));
        edge_usage_csv(e, g).save(dir / ("edge_usage_" + label + ".csv"));
    }
    geodesic_inventory_csv(g, src, dst).save(dir / "geodesics.csv");
    paths_summary_csv(runs, alpha).save(dir / "summary.csv");
    write_edge_list(g, dir / "graph.txt");
    std::cerr << "src " << src << ", dst " << dst << ", outputs in " << dir.string() << '\n';
    return kOk;
}

int run_memory_report(const Options& o) {
    const Graph g = load_graph(o, DefaultGraph::Gabriel);
    const auto spec = laplacian(g);
    const auto ts = times(o, 1e-3, 1e-2, 5);
    const int k = o.j.empty() ? 21 : o.j.front();
    emit(memory_report(spec, g, single_alpha(o, 0.5), o.src.value_or(0), ts, k, 0.5 * ts.front()), o);
    return kOk;
}

int run_ctrw(const Options& o) {
    const double alpha = single_alpha(o, 0.5);
    const double t = o.t_lo.value_or(1.0);
    emit(ctrw_report(alpha, t, o.full ? 1000000 : 100000, o.seed), o);
    return kOk;
}

int run_volterra_check(const Options& o) {
    const Graph g = load_graph(o, DefaultGraph::ER40);
    const auto spec = laplacian(g);
    emit(volterra_report(spec, or_default(o.alpha, {0.3, 0.5, 0.8}), {0.1, 0.5, 1.0, 5.0, 10.0},
                         or_default(o.j, {10, 20, 40, 80}), single_epsilon(o)),
         o);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subdiffusion on graphs: Mittag-Leffler operators, sum-of-exponentials schemes and experiments"};
    app.require_subcommand(1);
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Entry entries[] = {
        {"gen-graph", "Generate an Erdos-Renyi or Gabriel graph as an edge list", run_gen_graph},
        {"window-table", "Truncation windows (theta_min, theta_max) per alpha and epsilon", run_window_table},
        {"soe-table", "SOE coefficients sorted by weight (default alpha 0.85, J 111)", run_soe_table},
        {"error-heatmap", "Scalar SOE error over (alpha, t, J) on ER(250,1000)", run_error_heatmap},
        {"survival", "Exact and SOE waiting-time survival, pdf and hazard", run_survival},
        {"paths", "Subdiffusive shortest paths over a time grid (Gabriel graph)", run_paths},
        {"memory-report", "Caputo memory decomposition at a source vertex and its neighbors", run_memory_report},
        {"ctrw", "Monte-Carlo waiting times, clock moments and geodesic selection", run_ctrw},
        {"volterra-check", "Resolvent, Laplace and multiplex identity residuals", run_volterra_check},
    };
    Options opts;
    std::vector<std::pair<CLI::App*, const Entry*>> cmds;
    for (const auto& e : entries) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, opts);
        cmds.push_back({cmd, &e});
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    try {
        for (const auto& [cmd, entry] : cmds)
            if (cmd->parsed()) return entry->run(opts);
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const GraphError& e) {
        std::cerr << "graph error: " << e.what() << '\n';
        return kGraph;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
