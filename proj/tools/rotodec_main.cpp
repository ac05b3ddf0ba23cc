// rotodec command-line tool: single-rate queries, parameter sweeps, channel
// tables, coherence evolution traces and the self-verification suite, with
// deterministic CSV output.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input,
// 3 numerical non-convergence. ROTODEC_THREADS caps worker threads (0 = auto).

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotodec/constants.hpp"
#include "rotodec/core_types.hpp"
#include "rotodec/csv.hpp"
#include "rotodec/decoherence_rates.hpp"
#include "rotodec/partial_waves.hpp"
#include "rotodec/planck_bath.hpp"
#include "rotodec/scattering_model.hpp"
#include "rotodec/verify.hpp"

namespace {

constexpr const char* kCsvHeader = "# rotodec-csv v1\n";

struct Options {
    double temp_K = 300.0;
    std::vector<double> vols = {1.0e-25, 0.5e-25, 0.5e-25};
    double omega = rotodec::pi / 2.0;
    int grid_order = 8;
    std::string convention = "avg_avg";
    int lmax = 3;
    std::string out_path;
    std::string config_path;
    std::string axis = "temperature";
    double start = 0.0, stop = 0.0;
    int steps = 0;
    std::vector<double> angles;
    std::vector<double> times;
};

// One CLI11 option handle per config key so the config file can fill in
// whatever the command line did not set (flags take precedence).
struct OptionRefs {
    std::map<std::string, CLI::Option*> by_key;
};

void add_common_options(CLI::App* cmd, Options& o, OptionRefs& refs) {
    refs.by_key["temp-K"] =
        cmd->add_option("--temp-K", o.temp_K, "blackbody temperature in kelvin");
    refs.by_key["alpha-vol-m3"] =
        cmd->add_option("--alpha-vol-m3", o.vols,
                        "polarizability volumes vx,vy,vz in m^3")
            ->delimiter(',')
            ->expected(3);
    refs.by_key["omega-rad"] =
        cmd->add_option("--omega-rad", o.omega, "orientation difference in radians");
    refs.by_key["grid-order"] =
        cmd->add_option("--grid-order", o.grid_order, "angular quadrature band limit L");
    refs.by_key["pol-convention"] =
        cmd->add_option("--pol-convention", o.convention,
                        "polarization bookkeeping: sum_sum, avg_sum or avg_avg");
    refs.by_key["lmax"] = cmd->add_option("--lmax", o.lmax, "largest channel index l");
    refs.by_key["out"] = cmd->add_option("--out", o.out_path, "write CSV to this path");
    refs.by_key["config"] =
        cmd->add_option("--config", o.config_path, "key=value config file ('#' comments)");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
    }
    return out;
}

// Fill in options that were not given on the command line from the config
// file, so that flags always win.
void apply_config(Options& o, const OptionRefs& refs) {
    if (o.config_path.empty()) return;
    const auto kv = read_config_file(o.config_path);
    auto unset = [&](const char* key) {
        auto it = refs.by_key.find(key);
        return it != refs.by_key.end() && it->second->count() == 0 && kv.count(key) > 0;
    };
    try {
        if (unset("temp-K")) o.temp_K = std::stod(kv.at("temp-K"));
        if (unset("alpha-vol-m3")) o.vols = parse_double_list(kv.at("alpha-vol-m3"));
        if (unset("omega-rad")) o.omega = std::stod(kv.at("omega-rad"));
        if (unset("grid-order")) o.grid_order = std::stoi(kv.at("grid-order"));
        if (unset("pol-convention")) o.convention = kv.at("pol-convention");
        if (unset("lmax")) o.lmax = std::stoi(kv.at("lmax"));
        if (unset("out")) o.out_path = kv.at("out");
        if (unset("axis")) o.axis = kv.at("axis");
        if (unset("start")) o.start = std::stod(kv.at("start"));
        if (unset("stop")) o.stop = std::stod(kv.at("stop"));
        if (unset("steps")) o.steps = std::stoi(kv.at("steps"));
        if (unset("angles")) o.angles = parse_double_list(kv.at("angles"));
        if (unset("times")) o.times = parse_double_list(kv.at("times"));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("config file " + o.config_path + ": malformed value");
    }
    if (o.vols.size() != 3)
        throw std::invalid_argument("alpha-vol-m3 must have exactly three components");
}

void write_output(const Options& o, const std::string& body) {
    if (o.out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output path: " + o.out_path);
    out << body;
}

rotodec::PolarizabilityTensor tensor_of(const Options& o) {
    return rotodec::polarizability_from_volume(o.vols[0], o.vols[1], o.vols[2]);
}

int cmd_rate(const Options& o) {
    using namespace rotodec;
    const ThermalBath bath(o.temp_K);
    const auto tensor = tensor_of(o);
    const auto conv = polarization_convention_from_string(o.convention);
    const RateResult closed = lambda_closed_form(bath, tensor, o.omega);
    const RateResult numeric = lambda_numeric(bath, tensor, o.omega, o.grid_order, conv);
    const double scale = std::max({std::abs(closed.lambda), std::abs(numeric.lambda), 1e-300});
    const double rel = std::abs(closed.lambda - numeric.lambda) / scale;
    const double tau = decoherence_time(bath, tensor, o.omega);

    std::string csv = kCsvHeader;
    csv += "T_K,vol_x_m3,vol_y_m3,vol_z_m3,omega_rad,grid_order,pol_convention,"
           "lambda_closed_per_s,lambda_numeric_per_s,rel_diff,tau_s\n";
    csv += format_sci(o.temp_K) + "," + format_sci(o.vols[0]) + "," + format_sci(o.vols[1]) +
           "," + format_sci(o.vols[2]) + "," + format_sci(o.omega) + "," +
           format_int(o.grid_order) + "," + to_string(conv) + "," +
           format_sci(closed.lambda) + "," + format_sci(numeric.lambda) + "," +
           format_sci(rel) + "," + format_sci(tau) + "\n";
    write_output(o, csv);
    if (!numeric.grid_meta.converged) {
        std::cerr << "rate: angular refinement drift " << format_sci(numeric.grid_meta.refinement_drift)
                  << " exceeds 1e-9\n";
        return 3;
    }
    return 0;
}

int cmd_scan(const Options& o) {
    using namespace rotodec;
    if (o.steps < 2) throw std::invalid_argument("scan: steps must be >= 2");
    if (!(o.stop > o.start)) throw std::invalid_argument("scan: stop must exceed start");
    const auto conv = polarization_convention_from_string(o.convention);

    enum class Axis { Temperature, Omega, Anisotropy } axis;
    if (o.axis == "temperature") axis = Axis::Temperature;
    else if (o.axis == "omega") axis = Axis::Omega;
    else if (o.axis == "anisotropy") axis = Axis::Anisotropy;
    else throw std::invalid_argument("scan: axis must be temperature, omega or anisotropy");

    std::string csv = kCsvHeader;
    const char* xname = axis == Axis::Temperature ? "T_K"
                        : axis == Axis::Omega     ? "omega_rad"
                                                  : "vol_x_m3";
    csv += std::string(xname) + ",lambda_closed_per_s,lambda_numeric_per_s,rel_diff\n";

    std::vector<double> xs, lc, ln;
    bool converged = true;
    for (int i = 0; i < o.steps; ++i) {
        const double f = static_cast<double>(i) / (o.steps - 1);
        const double x = axis == Axis::Temperature
                             ? o.start * std::pow(o.stop / o.start, f) // log-spaced
                             : o.start + (o.stop - o.start) * f;
        const double T = axis == Axis::Temperature ? x : o.temp_K;
        const double w = axis == Axis::Omega ? x : o.omega;
        const double vx = axis == Axis::Anisotropy ? x : o.vols[0];
        const ThermalBath bath(T);
        const auto tensor = polarizability_from_volume(vx, o.vols[1], o.vols[2]);
        const RateResult closed = lambda_closed_form(bath, tensor, w);
        const RateResult numeric = lambda_numeric(bath, tensor, w, o.grid_order, conv);
        converged = converged && numeric.grid_meta.converged;
        const double scale =
            std::max({std::abs(closed.lambda), std::abs(numeric.lambda), 1e-300});
        csv += format_sci(x) + "," + format_sci(closed.lambda) + "," +
               format_sci(numeric.lambda) + "," +
               format_sci(std::abs(closed.lambda - numeric.lambda) / scale) + "\n";
        xs.push_back(x);
        lc.push_back(closed.lambda);
        ln.push_back(numeric.lambda);
    }
    if (axis == Axis::Temperature) {
        std::vector<double> lx, lyc, lyn;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            lx.push_back(std::log(xs[i]));
            lyc.push_back(std::log(lc[i]));
            lyn.push_back(std::log(ln[i]));
        }
        csv += "# loglog_slope_lambda_closed_vs_T = " +
               format_sci(rotodec::detail::ls_slope(lx, lyc)) + "\n";
        csv += "# loglog_slope_lambda_numeric_vs_T = " +
               format_sci(rotodec::detail::ls_slope(lx, lyn)) + "\n";
    }
    write_output(o, csv);
    if (!converged) {
        std::cerr << "scan: angular refinement did not converge at grid order "
                  << o.grid_order << "\n";
        return 3;
    }
    return 0;
}

int cmd_partialwave(const Options& o) {
    using namespace rotodec;
    const ThermalBath bath(o.temp_K);
    const auto tensor = tensor_of(o);
    const auto conv = polarization_convention_from_string(o.convention);
    const PartialWaveTable table =
        build_table(o.lmax, bath, tensor, o.omega, o.grid_order, conv);

    std::string csv = kCsvHeader;
    csv += "l,lprime,i_zero,i_omega,lambda_llprime_per_s,ratio_to_closed,converged\n";
    for (const auto& e : table.entries()) {
        const double ratio = table.lambda_closed() != 0.0
                                 ? e.lambda / table.lambda_closed()
                                 : std::numeric_limits<double>::quiet_NaN();
        csv += format_int(e.l) + "," + format_int(e.lp) + "," + format_sci(e.i_zero) + "," +
               format_sci(e.i_omega) + "," + format_sci(e.lambda) + "," + format_sci(ratio) +
               "," + (e.converged ? "1" : "0") + "\n";
    }
    csv += "# partial_sum_per_s = " + format_sci(table.total()) + "\n";
    csv += "# lambda_closed_per_s = " + format_sci(table.lambda_closed()) + "\n";
    csv += "# partial_sum_ratio = " + format_sci(table.ratio_to_closed()) + "\n";
    write_output(o, csv);
    if (!table.all_converged()) {
        std::cerr << "partialwave: channel refinement did not converge at grid order "
                  << o.grid_order << "\n";
        return 3;
    }
    return 0;
}

int cmd_evolve(const Options& o) {
    using namespace rotodec;
    if (o.angles.size() < 2) throw std::invalid_argument("evolve: need at least two angles");
    if (o.times.empty()) throw std::invalid_argument("evolve: need at least one time");
    for (std::size_t i = 0; i < o.times.size(); ++i) {
        if (o.times[i] < 0.0) throw std::invalid_argument("evolve: times must be >= 0");
        if (i > 0 && o.times[i] <= o.times[i - 1])
            throw std::invalid_argument("evolve: times must be strictly ascending");
    }
    const ThermalBath bath(o.temp_K);
    const auto tensor = tensor_of(o);
    const CoherenceGrid rho0 = CoherenceGrid::equal_superposition(o.angles);

    std::string csv = kCsvHeader;
    csv += "t_s,i,j,abs_rho,arg_rho\n";
    for (double t : o.times) {
        const CoherenceGrid rho = evolve_coherences(rho0, bath, tensor, t);
        for (std::size_t i = 0; i < rho.size(); ++i)
            for (std::size_t j = 0; j < rho.size(); ++j)
                csv += format_sci(t) + "," + format_int(static_cast<long long>(i)) + "," +
                       format_int(static_cast<long long>(j)) + "," +
                       format_sci(std::abs(rho(i, j))) + "," +
                       format_sci(std::arg(rho(i, j))) + "\n";
    }
    write_output(o, csv);
    return 0;
}

int cmd_verify(const Options& o) {
    using namespace rotodec;
    VerifyConfig cfg;
    cfg.temperature = o.temp_K;
    cfg.volumes = {o.vols[0], o.vols[1], o.vols[2]};
    cfg.omega = o.omega;
    cfg.grid_order = o.grid_order;
    cfg.convention = polarization_convention_from_string(o.convention);
    cfg.l_max = o.lmax;
    const VerifyReport report = run_verification(cfg);
    std::cout << report.text();
    if (!o.out_path.empty()) {
        std::string csv = kCsvHeader;
        csv += "check,residual,threshold,pass\n";
        for (const auto& c : report.checks)
            csv += c.name + "," + format_sci(c.residual) + "," + format_sci(c.threshold) +
                   "," + (c.pass ? "1" : "0") + "\n";
        Options oo = o;
        write_output(oo, csv);
    }
    return report.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotational decoherence of a dielectric ellipsoid in a thermal photon bath"};
    app.require_subcommand(1);
    app.footer("ROTODEC_THREADS caps worker threads (0 or unset = auto).");

    Options o;
    OptionRefs refs;

    CLI::App* rate = app.add_subcommand("rate", "closed-form and quadrature rate for one configuration");
    add_common_options(rate, o, refs);

    CLI::App* scan = app.add_subcommand("scan", "sweep temperature, omega or anisotropy");
    add_common_options(scan, o, refs);
    refs.by_key["axis"] = scan->add_option("--axis", o.axis, "temperature, omega or anisotropy");
    refs.by_key["start"] = scan->add_option("--start", o.start, "sweep start value");
    refs.by_key["stop"] = scan->add_option("--stop", o.stop, "sweep stop value");
    refs.by_key["steps"] = scan->add_option("--steps", o.steps, "number of grid points (>= 2)");

    CLI::App* pw = app.add_subcommand("partialwave", "channel table Lambda_ll' up to lmax");
    add_common_options(pw, o, refs);

    CLI::App* evolve = app.add_subcommand("evolve", "coherence decay for a superposition of angles");
    add_common_options(evolve, o, refs);
    refs.by_key["angles"] =
        evolve->add_option("--angles", o.angles, "superposed angles, rad")->delimiter(',');
    refs.by_key["times"] =
        evolve->add_option("--times", o.times, "output times, s, ascending")->delimiter(',');

    CLI::App* verify = app.add_subcommand("verify", "run the self-verification suite");
    add_common_options(verify, o, refs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        apply_config(o, refs);
        if (rate->parsed()) return cmd_rate(o);
        if (scan->parsed()) return cmd_scan(o);
        if (pw->parsed()) return cmd_partialwave(o);
        if (evolve->parsed()) return cmd_evolve(o);
        if (verify->parsed()) return cmd_verify(o);
    } catch (const rotodec::nonconvergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
