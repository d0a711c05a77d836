#include "iadas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace iadas {

namespace {

constexpr std::uint64_t kChannelSalt = 0xc4a1;
constexpr std::uint64_t kInitSalt = 0x1417;
constexpr std::uint64_t kGeometrySalt = 0x6e0;
constexpr std::uint64_t kPlacementSalt = 0x91ac;

constexpr double kHighSnrThresholdDb = 30.0;

double noise_for_snr(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

SolverOptions trial_options(const SolverOptions& base, const RandomSeed& seed) {
    SolverOptions o = base;
    o.init_seed = seed.derive(kInitSalt);
    return o;
}

void require_rayleigh(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.channel_model != ChannelModel::rayleigh) throw ConfigError("SNR sweeps need channel_model = rayleigh");
}

void require_das(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.channel_model != ChannelModel::das) throw ConfigError("cell experiments need channel_model = das");
}

struct SweepTrial {
    // rates[mode][snr]
    std::vector<std::vector<double>> rates;
    std::vector<char> converged;
};

SweepTrial sweep_trial(const ExperimentConfig& cfg, const std::vector<PowerMode>& modes, int trial) {
    const RandomSeed seed{cfg.master_seed, static_cast<std::uint64_t>(trial)};
    const ChannelSet channels = draw_rayleigh(cfg.shape, seed.derive(kChannelSalt));
    const SolverOptions opts = trial_options(cfg.solver, seed);

    std::optional<IASolution> unconstrained;
    const auto need_unconstrained = [&]() -> const IASolution& {
        if (!unconstrained) unconstrained = solve_unconstrained(channels, 1.0, opts);
        return *unconstrained;
    };

    SweepTrial out;
    for (PowerMode mode : modes) {
        std::vector<Precoder> precoders;
        bool converged = false;
        switch (mode) {
            case PowerMode::unconstrained: {
                const IASolution& s = need_unconstrained();
                precoders = s.precoders;
                converged = s.converged;
                break;
            }
            case PowerMode::max_power_backoff: {
                const IASolution& s = need_unconstrained();
                precoders = apply_backoff(s, cfg.shape, 1.0).first.precoders;
                converged = s.converged;
                break;
            }
            case PowerMode::strict_per_rru: {
                IASolution s = solve_strict(channels, cfg.shape, 1.0, opts);
                precoders = std::move(s.precoders);
                converged = s.converged;
                break;
            }
        }
        std::vector<double> rates;
        rates.reserve(cfg.snr_grid_db.size());
        for (double snr : cfg.snr_grid_db) rates.push_back(sum_rate(channels, precoders, noise_for_snr(snr)).sum_rate);
        out.rates.push_back(std::move(rates));
        out.converged.push_back(converged ? 1 : 0);
    }
    return out;
}

std::vector<SweepTrial> run_sweep_trials(const ExperimentConfig& cfg, const std::vector<PowerMode>& modes) {
    std::vector<SweepTrial> trials(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads,
                 [&](int t) { trials[static_cast<std::size_t>(t)] = sweep_trial(cfg, modes, t); });
    return trials;
}

ResultRow aggregate(const std::vector<double>& values, double convergence, const std::string& experiment,
                    const ExperimentConfig& cfg, const std::string& algorithm) {
    const Summary s = summarize(values);
    ResultRow row;
    row.experiment = experiment;
    row.shape = cfg.shape.label();
    row.algorithm = algorithm;
    row.mean_sum_rate = s.mean;
    row.std_sum_rate = s.std;
    row.convergence_rate = convergence;
    row.trials = static_cast<int>(values.size());
    row.seed = cfg.master_seed;
    return row;
}

double fraction(const std::vector<char>& flags) {
    if (flags.empty()) return 0.0;
    std::size_t n = 0;
    for (char f : flags) n += f ? 1U : 0U;
    return static_cast<double>(n) / static_cast<double>(flags.size());
}

// Rows for one experiment axis value over all four arms.
std::vector<ResultRow> arm_rows(const ExperimentConfig& cfg, const std::string& experiment,
                                const std::vector<const DropResult*>& drops) {
    std::vector<double> col, bo, st, sel;
    std::vector<char> col_c, unc_c, st_c;
    for (const DropResult* d : drops) {
        col.push_back(d->colocated);
        bo.push_back(d->das_backoff);
        st.push_back(d->das_strict);
        sel.push_back(d->rru_selection);
        col_c.push_back(d->colocated_converged ? 1 : 0);
        unc_c.push_back(d->unconstrained_converged ? 1 : 0);
        st_c.push_back(d->strict_converged ? 1 : 0);
    }
    return {aggregate(col, fraction(col_c), experiment, cfg, kArmColocated),
            aggregate(bo, fraction(unc_c), experiment, cfg, kArmDasBackoff),
            aggregate(st, fraction(st_c), experiment, cfg, kArmDasStrict),
            aggregate(sel, 1.0, experiment, cfg, kArmRruSelection)};
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int workers = std::clamp(threads, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(n);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, RowAxis axis,
               const std::vector<std::string>& comments) {
    const bool flag_column = std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.high_snr_valid.has_value(); });
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "experiment,shape,constraint_mode,";
    switch (axis) {
        case RowAxis::snr: out << "snr_db"; break;
        case RowAxis::distance: out << "distance_m"; break;
        case RowAxis::grid: out << "grid_x,grid_y"; break;
    }
    out << ",mean_sum_rate,std_sum_rate,convergence_rate,trials,seed";
    if (flag_column) out << ",high_snr_valid";
    out << '\n';
    for (const auto& r : rows) {
        out << r.experiment << ',' << '"' << r.shape << '"' << ',' << r.algorithm << ',';
        switch (axis) {
            case RowAxis::snr: out << fmt(r.snr_db); break;
            case RowAxis::distance: out << fmt(r.distance_m); break;
            case RowAxis::grid: out << fmt(r.grid_x) << ',' << fmt(r.grid_y); break;
        }
        out << ',' << fmt(r.mean_sum_rate) << ',' << fmt(r.std_sum_rate) << ',' << fmt(r.convergence_rate) << ','
            << r.trials << ',' << r.seed;
        if (flag_column) out << ',' << (r.high_snr_valid.value_or(false) ? "true" : "false");
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const std::vector<ResultRow>& rows, RowAxis axis,
                    const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    write_csv(out, rows, axis, comments);
    if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<ResultRow> run_snr_sweep(const ExperimentConfig& cfg) {
    require_rayleigh(cfg);
    const auto trials = run_sweep_trials(cfg, cfg.modes);
    std::vector<ResultRow> rows;
    for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
        std::vector<char> conv;
        for (const auto& t : trials) conv.push_back(t.converged[m]);
        const double conv_rate = fraction(conv);
        for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
            std::vector<double> values;
            values.reserve(trials.size());
            for (const auto& t : trials) values.push_back(t.rates[m][i]);
            ResultRow row = aggregate(values, conv_rate, "sweep", cfg, to_string(cfg.modes[m]));
            row.snr_db = cfg.snr_grid_db[i];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ResultRow> run_backoff_prediction(const ExperimentConfig& cfg) {
    require_rayleigh(cfg);
    if (cfg.shape.streams != 1) throw ConfigError("backoff prediction needs single-stream shapes (streams = 1)");
    const std::vector<PowerMode> modes{PowerMode::unconstrained, PowerMode::max_power_backoff};
    const auto trials = run_sweep_trials(cfg, modes);
    const BackoffModel model = BackoffModel::for_shape(cfg.shape, cfg.backoff_exponent, cfg.backoff_convention);
    const double loss = expected_rate_loss(model, cfg.shape.users, 1.0, 1.0);

    std::vector<char> conv;
    for (const auto& t : trials) conv.push_back(t.converged[0]);
    const double conv_rate = fraction(conv);

    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        const double snr = cfg.snr_grid_db[i];
        std::vector<double> unc, bo;
        for (const auto& t : trials) {
            unc.push_back(t.rates[0][i]);
            bo.push_back(t.rates[1][i]);
        }
        ResultRow u = aggregate(unc, conv_rate, "backoff_predict", cfg, to_string(PowerMode::unconstrained));
        ResultRow b = aggregate(bo, conv_rate, "backoff_predict", cfg, to_string(PowerMode::max_power_backoff));
        ResultRow p = u;
        p.algorithm = "predicted_backoff";
        p.mean_sum_rate = u.mean_sum_rate - loss;
        for (ResultRow* r : {&u, &b, &p}) {
            r->snr_db = snr;
            r->high_snr_valid = snr >= kHighSnrThresholdDb;
            rows.push_back(*r);
        }
    }
    return rows;
}

std::vector<Precoder> rru_selection_precoders(const ChannelSet& channels, const SystemShape& shape, double total_power) {
    shape.validate();
    if (!channels.has_large_scale_gain()) throw GeometryMismatch("RRU selection needs large-scale gains");
    if (channels.shape.users != shape.users || channels.shape.rrus != shape.rrus)
        throw DimensionMismatch("channel set does not match the shape");
    const int per_rru = shape.antennas_per_rru();
    if (per_rru < shape.streams)
        throw StreamsExceedRruAntennas("RRU selection needs Nt/N_RRU >= Ns, got " + std::to_string(per_rru) + " < " +
                                       std::to_string(shape.streams));
    const double amplitude = std::sqrt(total_power / (static_cast<double>(shape.rrus) * shape.streams));
    std::vector<Precoder> out;
    for (int k = 0; k < shape.users; ++k) {
        int best = 0;
        for (int r = 1; r < shape.rrus; ++r)
            if (channels.gain(k, k, r) > channels.gain(k, k, best)) best = r;
        const ComplexMatrix sub = channels.at(k, k).middleCols(best * per_rru, per_rru);
        Eigen::JacobiSVD<ComplexMatrix> svd(sub, Eigen::ComputeThinV);
        Precoder p{k, ComplexMatrix::Zero(shape.tx_antennas, shape.streams), shape.rrus};
        p.block(best) = amplitude * svd.matrixV().leftCols(shape.streams);
        out.push_back(std::move(p));
    }
    return out;
}

RateSample rru_selection_baseline(const ChannelSet& channels, const NetworkGeometry& geometry, const SystemShape& shape,
                                  double total_power, double noise_power) {
    if (static_cast<int>(geometry.rru_offsets.size()) != shape.rrus)
        throw GeometryMismatch("geometry RRU count does not match the shape");
    return sum_rate(channels, rru_selection_precoders(channels, shape, total_power), noise_power);
}

DropResult simulate_drop(const ExperimentConfig& cfg, const RandomSeed& seed, std::optional<Point> centre_user) {
    const SystemShape& shape = cfg.shape;
    NetworkGeometry geom = build_geometry(cfg.geometry.cell_radius, shape.users, seed.derive(kGeometrySalt),
                                          cfg.geometry.propagation);
    if (centre_user) geom.user_positions[0] = *centre_user;

    const double snr = dbm_to_watts(cfg.total_power_dbm) / dbm_to_watts(cfg.noise_power_dbm);
    const double scale = std::sqrt(snr);
    const ChannelSet das = draw_das_channels(geom, shape, seed.derive(kChannelSalt)).scaled(scale);
    SystemShape colocated_shape = shape;
    colocated_shape.rrus = 1;
    const ChannelSet col = draw_das_channels(geom.colocated(), colocated_shape, seed.derive(kChannelSalt)).scaled(scale);
    const SolverOptions opts = trial_options(cfg.solver, seed);

    DropResult d;
    d.centre_user = geom.user_positions[0];
    d.distance_m = distance(d.centre_user, geom.cell_centers[0]);

    IASolution col_sol = solve_unconstrained(col, 1.0, opts);
    d.colocated_converged = col_sol.converged;
    if (cfg.geometry.colocated_per_antenna) {
        SystemShape per_antenna = colocated_shape;
        per_antenna.rrus = shape.tx_antennas;
        col_sol = apply_backoff(col_sol, per_antenna, 1.0).first;
    }
    d.colocated = sum_rate(col, col_sol.precoders, 1.0).per_user_rate[0];

    const IASolution unc = solve_unconstrained(das, 1.0, opts);
    d.unconstrained_converged = unc.converged;
    d.das_backoff = sum_rate(das, apply_backoff(unc, shape, 1.0).first.precoders, 1.0).per_user_rate[0];

    const IASolution strict = solve_strict(das, shape, 1.0, opts);
    d.strict_converged = strict.converged;
    d.das_strict = sum_rate(das, strict.precoders, 1.0).per_user_rate[0];

    d.rru_selection = rru_selection_baseline(das, geom, shape, 1.0, 1.0).per_user_rate[0];
    return d;
}

Point uniform_in_ring(Point center, double radius, double lo, double hi, Rng& rng) {
    if (!(hi > lo) || lo < 0.0 || !(lo < radius)) throw DomainError("ring does not intersect the cell");
    std::uniform_real_distribution<double> u2(lo * lo, hi * hi);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (;;) {
        const double r = std::sqrt(u2(rng));
        const double a = angle(rng);
        const Point p{center.x + r * std::cos(a), center.y + r * std::sin(a)};
        if (inside_hexagon(p, center, radius)) return p;
    }
}

std::vector<DropResult> rate_vs_distance_drops(const ExperimentConfig& cfg) {
    require_das(cfg);
    const auto& edges = cfg.geometry.distance_bins_m;
    const int bins = static_cast<int>(edges.size()) - 1;
    const int n = bins * cfg.trials;
    std::vector<DropResult> drops(static_cast<std::size_t>(n));
    parallel_for(n, cfg.threads, [&](int i) {
        const int b = i / cfg.trials;
        const RandomSeed seed{cfg.master_seed, static_cast<std::uint64_t>(i)};
        Rng rng = make_rng(seed.derive(kPlacementSalt));
        const Point p = uniform_in_ring({0.0, 0.0}, cfg.geometry.cell_radius, edges[static_cast<std::size_t>(b)],
                                        edges[static_cast<std::size_t>(b) + 1], rng);
        drops[static_cast<std::size_t>(i)] = simulate_drop(cfg, seed, p);
    });
    return drops;
}

std::vector<ResultRow> summarize_rate_vs_distance(const ExperimentConfig& cfg, const std::vector<DropResult>& drops) {
    const auto& edges = cfg.geometry.distance_bins_m;
    const int bins = static_cast<int>(edges.size()) - 1;
    if (static_cast<int>(drops.size()) != bins * cfg.trials)
        throw DimensionMismatch("drop count does not match bins x trials");
    std::vector<ResultRow> rows;
    for (int b = 0; b < bins; ++b) {
        std::vector<const DropResult*> in_bin;
        for (int t = 0; t < cfg.trials; ++t) in_bin.push_back(&drops[static_cast<std::size_t>(b * cfg.trials + t)]);
        const double mid = 0.5 * (edges[static_cast<std::size_t>(b)] + edges[static_cast<std::size_t>(b) + 1]);
        for (ResultRow& r : arm_rows(cfg, "rate_vs_distance", in_bin)) {
            r.distance_m = mid;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::vector<ResultRow> run_rate_vs_distance(const ExperimentConfig& cfg) {
    return summarize_rate_vs_distance(cfg, rate_vs_distance_drops(cfg));
}

std::vector<Point> cell_grid(const GeometryConfig& geometry) {
    std::vector<Point> points;
    const double step = geometry.grid_step_m;
    const int n = static_cast<int>(std::floor(geometry.cell_radius / step));
    for (int j = -n; j <= n; ++j)
        for (int i = -n; i <= n; ++i) {
            const Point p{i * step, j * step};
            if (inside_hexagon(p, {0.0, 0.0}, geometry.cell_radius)) points.push_back(p);
        }
    return points;
}

std::vector<ResultRow> run_cell_map(const ExperimentConfig& cfg) {
    require_das(cfg);
    const std::vector<Point> grid = cell_grid(cfg.geometry);
    const int n = static_cast<int>(grid.size()) * cfg.trials;
    std::vector<DropResult> drops(static_cast<std::size_t>(n));
    parallel_for(n, cfg.threads, [&](int i) {
        const RandomSeed seed{cfg.master_seed, static_cast<std::uint64_t>(i)};
        drops[static_cast<std::size_t>(i)] = simulate_drop(cfg, seed, grid[static_cast<std::size_t>(i / cfg.trials)]);
    });
    std::vector<ResultRow> rows;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<const DropResult*> at_point;
        for (int t = 0; t < cfg.trials; ++t)
            at_point.push_back(&drops[g * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)]);
        for (ResultRow& r : arm_rows(cfg, "cellmap", at_point)) {
            r.grid_x = grid[g].x;
            r.grid_y = grid[g].y;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

CellExperimentResults run_cell_experiments(const ExperimentConfig& cfg) {
    return {run_cell_map(cfg), run_rate_vs_distance(cfg)};
}

std::vector<PropernessReport> properness_table(const PropernessGrid& grid) {
    std::vector<PropernessReport> out;
    for (int k : grid.users)
        for (int nt : grid.tx_antennas)
            for (int nr : grid.rx_antennas)
                for (int ns : grid.streams) {
                    // per_antenna and an explicit count can name the same shape
                    std::vector<int> seen;
                    for (int rr : grid.rrus) {
                        const SystemShape s{k, nt, nr, ns, rr == 0 ? nt : rr};
                        try {
                            s.validate();
                        } catch (const InvalidShape&) {
                            continue;
                        }
                        if (std::find(seen.begin(), seen.end(), s.rrus) != seen.end()) continue;
                        seen.push_back(s.rrus);
                        out.push_back(is_proper(s));
                    }
                }
    return out;
}

void write_properness_text(std::ostream& out, const std::vector<PropernessReport>& table) {
    out << std::left << std::setw(18) << "shape" << std::right << std::setw(6) << "N_v" << std::setw(7) << "N_e1"
        << std::setw(7) << "N_e2" << "  class\n";
    for (const auto& r : table)
        out << std::left << std::setw(18) << r.shape.label() << std::right << std::setw(6) << r.n_vars << std::setw(7)
            << r.n_eqs_alignment << std::setw(7) << r.n_eqs_power << "  " << to_string(classify(r)) << '\n';
}

void write_properness_csv(std::ostream& out, const std::vector<PropernessReport>& table) {
    out << "users,tx_antennas,rx_antennas,streams,rrus,n_vars,n_eqs_alignment,n_eqs_power,proper_unconstrained,"
           "proper_strict,classification\n";
    for (const auto& r : table)
        out << r.shape.users << ',' << r.shape.tx_antennas << ',' << r.shape.rx_antennas << ',' << r.shape.streams << ','
            << r.shape.rrus << ',' << r.n_vars << ',' << r.n_eqs_alignment << ',' << r.n_eqs_power << ','
            << (r.proper_unconstrained ? 1 : 0) << ',' << (r.proper_strict ? 1 : 0) << ',' << '"'
            << to_string(classify(r)) << '"' << '\n';
}

}  // namespace iadas
