#pragma once

#include "cnc/harness/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cnc::harness {

// ---- eval-blackjack ----

struct ErrorPoint {
    double cnc_mse = 0.0;
    double cnc_maxse = 0.0;
    double mc_mse = 0.0;
    double mc_maxse = 0.0;
};

struct BlackjackEvalResult {
    std::vector<std::uint64_t> checkpoints; // episodes
    std::vector<std::vector<ErrorPoint>> trials; // [trial][checkpoint]
    std::size_t pairs = 0; // state-action pairs scored
};

// Errors are taken over the pairs the target policy plays, against the
// exact Q table. Monte Carlo entries not yet visited count as 0.
BlackjackEvalResult run_blackjack_eval(const ExperimentConfig &cfg);
// episode, cnc_mse, cnc_maxse, mc_mse, mc_maxse, then the inter-trial
// standard error and median of each.
void write_blackjack_curve(std::ostream &out, const BlackjackEvalResult &r);
void write_blackjack_trials(std::ostream &out, const BlackjackEvalResult &r);

// ---- control ----

struct ControlPoint {
    std::uint64_t step = 0;
    std::uint64_t games = 0;    // completed so far
    double avg_reward = 0.0;    // over the logging interval
    double game_score = 0.0;    // mean score of games finished in the interval (NaN if none)
    double epsilon = 0.0;
};

struct ControlTrial {
    std::vector<ControlPoint> curve;
    std::vector<double> game_scores; // agent points minus opponent points, per game
    double final_score = 0.0;        // mean over the last final_games games
    std::uint64_t degenerate = 0;
};

struct AgentRuns {
    std::string agent; // "cnc" or "random"
    std::vector<ControlTrial> trials;
    double final_mean() const;
    double final_se() const;
};

struct ControlResult {
    std::vector<AgentRuns> agents; // cnc first when both ran
    // (cnc mean - random mean) / sqrt(se_cnc^2 + se_random^2); NaN without a baseline.
    double advantage_in_se() const;
};

ControlResult run_control(const ExperimentConfig &cfg);
void write_control_curve(std::ostream &out, const ControlResult &r);
void write_control_trials(std::ostream &out, const ControlResult &r);
void write_control_summary(std::ostream &out, const ControlResult &r);

// ---- rate-test ----

struct RateTestResult {
    std::vector<std::uint64_t> sample_sizes;
    std::vector<std::vector<double>> errors; // [trial][checkpoint]: RMS |Q_hat - Q| over defined pairs
    std::vector<double> median_errors;
    std::vector<double> ratios; // median_errors[k] / median_errors[k+1]
    double bound = 0.0;         // m (r_max - r_min)
};

RateTestResult run_rate_test(const ExperimentConfig &cfg);
void write_rate_report(std::ostream &out, const RateTestResult &r);
// True when every ratio lies in [lo, hi].
bool rate_within(const RateTestResult &r, double lo = 1.5, double hi = 3.0);

// ---- oracle-cert ----

struct CertRow {
    std::string name;
    std::size_t states = 0;
    std::size_t actions = 0;
    std::size_t horizon = 0;
    bool irreducible = false;
    bool aperiodic = false;
    std::size_t windows = 0;
    double residual = 0.0;
    double gap = 0.0;
    std::string status; // ok | gap | excluded | error
    std::string message;
};

struct OracleCertResult {
    std::vector<CertRow> rows;
    bool passed() const;
};

// Bundled corpus files first, then cfg.random_mdps generated ergodic MDPs.
// When q_dir is non-empty, Q tables and nu(z|s,a) of the bundled MDPs are
// written there as CSV.
OracleCertResult run_oracle_cert(const ExperimentConfig &cfg, const std::string &q_dir = "");
void write_cert_report(std::ostream &out, const OracleCertResult &r);

// %.17g, "nan" for NaN.
std::string format_double(double x);

} // namespace cnc::harness
