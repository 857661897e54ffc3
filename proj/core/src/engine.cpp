#include "ehsim/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>
#include <utility>

#include "ehsim/errors.hpp"
#include "ehsim/planner.hpp"

namespace ehsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoPhase = static_cast<std::size_t>(-1);
constexpr int kMaxStalledSteps = 1000;
constexpr double kBisectionTimeTolerance = 1e-9;

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kEventNames{{
    {EventKind::VOn, "VOn"},
    {EventKind::VOff, "VOff"},
    {EventKind::EehClamp, "EehClamp"},
    {EventKind::EehRelease, "EehRelease"},
    {EventKind::PhaseChange, "PhaseChange"},
    {EventKind::LuxChange, "LuxChange"},
    {EventKind::ColdStartBegin, "ColdStartBegin"},
    {EventKind::ColdStartEnd, "ColdStartEnd"},
}};

bool leaky(CircuitMode mode, bool leakage_in_connected_modes) {
    return !mode.eh_connected || leakage_in_connected_modes;
}

double capacitor_current(CircuitMode mode, double v, double p_eh, double p_cl, const CircuitParams& params,
                         bool leakage_in_connected_modes) {
    if (!(v > 0.0)) return 0.0;
    double i = net_power(mode, p_eh, p_cl, params) / v;
    if (leaky(mode, leakage_in_connected_modes)) i -= v / params.leakage_resistance;
    return i;
}

class Simulator {
public:
    explicit Simulator(const ScenarioConfig& config)
        : cfg_(config),
          params_(config.circuit),
          leak_(config.options.leakage_in_connected_modes),
          rng_(config.options.seed) {}

    SimTrace run() {
        trace_.leakage_in_connected_modes = leak_;
        t_ = 0.0;
        v_ = cfg_.initial_voltage;
        lux_index_ = 0;
        p_h_ = cfg_.harvest.power_at(cfg_.illumination.segments.front().lux);
        clamped_ = p_h_ > 0.0 && v_ >= cfg_.harvest.e_eh;
        if (v_ >= params_.v_on) {
            pm_on_ = true;
            begin_cycle(/*emit=*/false);
        } else {
            enter_off(/*emit=*/false);
        }
        push_record();

        const double horizon = cfg_.illumination.horizon;
        int stalled = 0;
        while (t_ < horizon) {
            const double before = t_;
            step(horizon);
            stalled = (t_ == before) ? stalled + 1 : 0;
            if (stalled > kMaxStalledSteps) {
                throw SimulationError("simulation stalled at t = " + std::to_string(t_) +
                                      " s (state chattering between events)");
            }
        }
        return std::move(trace_);
    }

private:
    struct Crossing {
        double dt = kInf;
        double target = 0.0;
        EventKind kind = EventKind::VOn;
    };

    [[nodiscard]] CircuitMode mode() const { return {pm_on_, p_h_ > 0.0 && !clamped_}; }
    [[nodiscard]] double delivered_power() const { return mode().eh_connected ? p_h_ : 0.0; }

    [[nodiscard]] double load_power() const {
        if (!pm_on_) return 0.0;
        switch (load_) {
            case LoadState::ColdStart:
                return params_.coldstart_duration > 0.0 ? params_.coldstart_energy / params_.coldstart_duration
                                                        : 0.0;
            case LoadState::Sleep:
                return cfg_.load.sleep_power();
            case LoadState::Off:
                return 0.0;
            default:
                return phase_power(cfg_.load.phases[phase_index_]);
        }
    }

    [[nodiscard]] double law(double v0, double dt) const {
        return evaluate_law(mode(), v0, dt, delivered_power(), load_power(), params_, leak_);
    }

    [[nodiscard]] double sleep_time() const {
        if (cfg_.sleep_time) return *cfg_.sleep_time;
        try {
            return solve_sleep_time(p_h_, cfg_.load);
        } catch (const NeverFeasibleError&) {
            return kInf;
        }
    }

    [[nodiscard]] double active_duration(std::size_t index) {
        const auto& phase = cfg_.load.phases[index];
        if (phase.name == LoadState::BleAdvertising && cfg_.options.randomize_advertising) {
            std::uniform_real_distribution<double> advertising(0.0, 4.0);
            return 4.0 - advertising(rng_);
        }
        return phase.duration;
    }

    void emit(EventKind kind) { trace_.events.push_back({t_, kind, v_}); }

    void set_load(LoadState next, bool emit_change) {
        const bool changed = next != load_;
        load_ = next;
        if (changed && emit_change) emit(EventKind::PhaseChange);
    }

    void begin_cycle(bool emit_change) {
        phase_index_ = 0;
        phase_end_ = t_ + active_duration(0);
        set_load(cfg_.load.phases[0].name, emit_change);
    }

    void enter_sleep() {
        const double t_s = sleep_time();
        if (t_s == 0.0) {
            begin_cycle(true);
            return;
        }
        phase_index_ = kNoPhase;
        sleep_start_ = t_;
        phase_end_ = t_ + t_s;
        set_load(LoadState::Sleep, true);
    }

    void enter_off(bool emit_change) {
        phase_index_ = kNoPhase;
        phase_end_ = kInf;
        set_load(LoadState::Off, emit_change);
    }

    void advance_phase() {
        switch (load_) {
            case LoadState::ColdStart:
                emit(EventKind::ColdStartEnd);
                begin_cycle(true);
                break;
            case LoadState::Sleep:
                begin_cycle(true);
                break;
            default:
                if (phase_index_ + 1 < cfg_.load.phases.size()) {
                    ++phase_index_;
                    phase_end_ = t_ + active_duration(phase_index_);
                    set_load(cfg_.load.phases[phase_index_].name, true);
                } else {
                    enter_sleep();
                }
                break;
        }
    }

    [[nodiscard]] std::optional<Crossing> crossing(double target, EventKind kind) const {
        const auto dt = time_to_voltage(mode(), v_, target, delivered_power(), load_power(), params_, leak_);
        if (!dt) return std::nullopt;
        return Crossing{*dt, target, kind};
    }

    [[nodiscard]] Crossing next_crossing() const {
        std::array<std::optional<Crossing>, 2> candidates;
        if (pm_on_) {
            candidates[0] = crossing(params_.v_off, EventKind::VOff);
        } else {
            candidates[0] = crossing(params_.v_on, EventKind::VOn);
        }
        if (mode().eh_connected) {
            candidates[1] = crossing(cfg_.harvest.e_eh, EventKind::EehClamp);
        } else if (clamped_) {
            candidates[1] = crossing(cfg_.harvest.e_eh - params_.eh_reconnect_hysteresis, EventKind::EehRelease);
        }
        Crossing best;
        for (const auto& c : candidates) {
            if (c && c->dt < best.dt) best = *c;
        }
        return best;
    }

    // Bisection on the forward law for crossings where the analytic inverse is ill-conditioned.
    [[nodiscard]] double refine_crossing(const Crossing& c, double window) const {
        const double v0 = v_;
        const double sign = (c.target > v0) ? 1.0 : -1.0;
        auto excess = [&](double s) { return sign * (law(v0, s) - c.target); };
        double lo = 0.0;
        double hi = std::min(window, std::max(c.dt * (1.0 + 1e-6), c.dt + kBisectionTimeTolerance));
        if (excess(hi) < 0.0) {
            throw SimulationError("event refinement did not converge on [" + std::to_string(t_) + ", " +
                                  std::to_string(t_ + hi) + "] s");
        }
        for (int i = 0; i < 200 && hi - lo > kBisectionTimeTolerance; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (excess(mid) < 0.0) lo = mid; else hi = mid;
        }
        if (std::abs(law(v0, hi) - c.target) > kVoltageTolerance) {
            throw SimulationError("event refinement did not converge on [" + std::to_string(t_) + ", " +
                                  std::to_string(t_ + hi) + "] s");
        }
        return hi;
    }

    void sample_until(double t_end) {
        const double interval = cfg_.record_interval;
        const double v0 = v_;
        const double t0 = t_;
        while (true) {
            const double s = static_cast<double>(next_sample_) * interval;
            if (s >= t_end) break;
            ++next_sample_;
            if (s <= t0) continue;
            TraceRecord r = make_record(s, law(v0, s - t0));
            trace_.records.push_back(r);
        }
    }

    void step(double horizon) {
        const double lux_end = cfg_.illumination.segment_end(lux_index_);
        double t_next = std::min({horizon, lux_end, phase_end_});
        const Crossing c = next_crossing();
        const bool threshold_fires = t_ + c.dt <= t_next;
        double dt = t_next - t_;
        if (threshold_fires) {
            dt = c.dt;
            if (std::abs(law(v_, dt) - c.target) > kVoltageTolerance) dt = refine_crossing(c, t_next - t_);
            t_next = t_ + dt;
        }

        sample_until(t_next);
        const double v_end = threshold_fires ? c.target : law(v_, dt);
        t_ = t_next;
        v_ = v_end;

        // Order: illumination, thresholds, load FSM.
        if (t_ >= lux_end && lux_index_ + 1 < cfg_.illumination.segments.size() && t_ < horizon) {
            ++lux_index_;
            p_h_ = cfg_.harvest.power_at(cfg_.illumination.segments[lux_index_].lux);
            emit(EventKind::LuxChange);
            if (!cfg_.sleep_time && load_ == LoadState::Sleep) phase_end_ = std::max(t_, sleep_start_ + sleep_time());
        }
        if (threshold_fires) {
            switch (c.kind) {
                case EventKind::VOff:
                    pm_on_ = false;
                    emit(EventKind::VOff);
                    enter_off(true);
                    break;
                case EventKind::VOn:
                    pm_on_ = true;
                    emit(EventKind::VOn);
                    if (params_.coldstart_duration > 0.0) {
                        emit(EventKind::ColdStartBegin);
                        phase_index_ = kNoPhase;
                        phase_end_ = t_ + params_.coldstart_duration;
                        set_load(LoadState::ColdStart, true);
                    } else {
                        begin_cycle(true);
                    }
                    break;
                case EventKind::EehClamp:
                    clamped_ = true;
                    emit(EventKind::EehClamp);
                    break;
                case EventKind::EehRelease:
                    clamped_ = false;
                    emit(EventKind::EehRelease);
                    break;
                default:
                    break;
            }
        }
        if (pm_on_ && t_ >= phase_end_ && t_ < horizon) advance_phase();
        push_record();
    }

    [[nodiscard]] TraceRecord make_record(double t, double v) const {
        const CircuitMode m = mode();
        const double pe = delivered_power();
        const double pc = load_power();
        return {t, v, load_, m, pe, pc, capacitor_current(m, v, pe, pc, params_, leak_)};
    }

    void push_record() {
        TraceRecord r = make_record(t_, v_);
        if (!trace_.records.empty() && trace_.records.back().t == t_) {
            trace_.records.back() = r;
        } else {
            trace_.records.push_back(r);
        }
    }

    const ScenarioConfig& cfg_;
    const CircuitParams& params_;
    const bool leak_;
    std::mt19937_64 rng_;

    SimTrace trace_;
    double t_ = 0.0;
    double v_ = 0.0;
    bool pm_on_ = false;
    bool clamped_ = false;
    LoadState load_ = LoadState::Off;
    std::size_t phase_index_ = kNoPhase;
    double phase_end_ = kInf;
    double sleep_start_ = 0.0;
    std::size_t lux_index_ = 0;
    double p_h_ = 0.0;
    long long next_sample_ = 1;
};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    for (const auto& [k, name] : kEventNames) {
        if (k == kind) return name;
    }
    return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
    for (const auto& [k, n] : kEventNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

void ScenarioConfig::validate() const {
    circuit.validate();
    harvest.validate();
    load.validate();
    illumination.validate();
    auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
    if (!(harvest.e_eh > circuit.v_on)) fail("E_eh must exceed V_on, otherwise the node never turns on");
    if (!(circuit.eh_reconnect_hysteresis < harvest.e_eh - circuit.v_off)) {
        fail("E_eh reconnect hysteresis must be smaller than E_eh - V_off");
    }
    if (!(initial_voltage >= 0.0) || !(initial_voltage <= harvest.e_eh)) {
        fail("initial voltage must lie in [0, E_eh]");
    }
    if (sleep_time && (!(*sleep_time >= 0.0) || !std::isfinite(*sleep_time))) {
        fail("sleep time must be >= 0");
    }
    if (!(record_interval > 0.0) || !std::isfinite(record_interval)) fail("record interval must be > 0");
}

SimTrace run(const ScenarioConfig& config) {
    config.validate();
    return Simulator(config).run();
}

std::vector<SweepResult> sweep(const std::vector<ScenarioConfig>& configs, unsigned max_threads) {
    std::vector<SweepResult> results(configs.size());
    if (configs.empty()) return results;

    unsigned threads = max_threads != 0 ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, configs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i].trace = run(configs[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    if (threads == 1) {
        worker();
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    return results;
}

EnergyBalance energy_balance(const SimTrace& trace, const CircuitParams& params) {
    EnergyBalance out;
    if (trace.records.empty()) return out;
    const double tau = params.time_constant();
    for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        const double dt = trace.records[i + 1].t - r.t;
        const double drawn = r.mode.pm_on ? params.w_pm * r.p_cl : 0.0;
        out.harvested += r.p_eh * dt;
        out.consumed += drawn * dt;
        if (leaky(r.mode, trace.leakage_in_connected_modes)) {
            // V^2(s) = A + (v0^2 - A) exp(-2 s / tau), A = p_net R_c.
            const double asymptote = (r.p_eh - drawn) * params.leakage_resistance;
            const double v0_sq = r.v_c * r.v_c;
            const double v_sq_integral = asymptote * dt + (v0_sq - asymptote) * 0.5 * tau * -std::expm1(-2.0 * dt / tau);
            out.leaked += v_sq_integral / params.leakage_resistance;
        }
    }
    const double v_start = trace.records.front().v_c;
    const double v_end = trace.records.back().v_c;
    out.delta_stored = 0.5 * params.capacitance * (v_end * v_end - v_start * v_start);
    return out;
}

std::vector<double> cycle_starts(const SimTrace& trace) {
    std::vector<double> starts;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const bool active = is_active(trace.records[i].load_state);
        const bool was_active = i > 0 && is_active(trace.records[i - 1].load_state);
        if (active && !was_active) starts.push_back(trace.records[i].t);
    }
    return starts;
}

std::vector<PeriodChange> period_changes(const SimTrace& trace) {
    std::vector<PeriodChange> out;
    const TraceRecord* previous = nullptr;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        const bool active = is_active(r.load_state);
        const bool was_active = i > 0 && is_active(trace.records[i - 1].load_state);
        if (!active || was_active) continue;
        if (previous != nullptr) out.push_back({previous->t, r.t, previous->v_c, r.v_c});
        previous = &r;
    }
    return out;
}

}  // namespace ehsim
