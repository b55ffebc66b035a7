#include "cnc/harness/experiments.hpp"

#include "cnc/envs/explicit_mdp.hpp"
#include "cnc/harness/trials.hpp"
#include "cnc/oracle/q.hpp"
#include "cnc/oracle/random_mdp.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace cnc::harness {

namespace {

void write_q_csv(const std::string &path, const oracle::OracleReport &rep) {
    std::ofstream out(path);
    out << "s,a,z,value\n";
    const auto &q = rep.q_dp;
    for (std::size_t s = 0; s < q.num_states; ++s) {
        for (std::size_t a = 0; a < q.num_actions; ++a) {
            out << s << ',' << a << ",*," << format_double(q.at(s, a)) << '\n';
        }
    }
}

void write_nu_csv(const std::string &path, const oracle::OracleReport &rep) {
    std::ofstream out(path);
    out << "s,a,z,value\n";
    const auto &mg = rep.marginals;
    for (std::size_t s = 0; s < mg.num_states; ++s) {
        for (std::size_t a = 0; a < mg.num_actions; ++a) {
            if (mg.nu_sa(s, a) <= 0.0) {
                continue;
            }
            for (std::size_t z = 0; z < mg.z_values.size(); ++z) {
                out << s << ',' << a << ',' << format_double(mg.z_values[z]) << ','
                    << format_double(mg.nu_z_given_sa(z, s, a)) << '\n';
            }
        }
    }
}

CertRow certify(const std::string &name, const envs::ExplicitMdp &mdp, const envs::Policy &policy,
                std::size_t m, double tol, const std::string &q_prefix) {
    CertRow row;
    row.name = name;
    row.states = mdp.num_states();
    row.actions = mdp.num_actions();
    row.horizon = m;
    try {
        const auto rep = oracle::run_oracle(mdp, policy, m);
        row.irreducible = rep.augmented_properties.irreducible;
        row.aperiodic = rep.augmented_properties.aperiodic;
        row.windows = rep.snake.size();
        row.residual = rep.stationary.residual;
        row.gap = rep.gap;
        if (!row.irreducible || !row.aperiodic) {
            row.status = "excluded";
            row.message = row.irreducible ? "periodic" : "reducible";
        } else {
            row.status = rep.gap <= tol ? "ok" : "gap";
        }
        if (!q_prefix.empty()) {
            write_q_csv(q_prefix + "_q.csv", rep);
            write_nu_csv(q_prefix + "_nu.csv", rep);
        }
    } catch (const std::exception &e) {
        row.status = "error";
        row.message = e.what();
    }
    return row;
}

} // namespace

bool OracleCertResult::passed() const {
    for (const auto &r : rows) {
        if (r.status == "gap" || r.status == "error") {
            return false;
        }
    }
    return true;
}

OracleCertResult run_oracle_cert(const ExperimentConfig &cfg, const std::string &q_dir) {
    OracleCertResult res;
    const std::size_t m_bundled = cfg.horizon.value_or(cfg.max_horizon);
    for (const auto &path : cfg.corpus) {
        const std::string name = std::filesystem::path(path).stem().string();
        try {
            const auto file = envs::load_explicit_mdp(path);
            const envs::Policy policy = file.policy ? *file.policy : envs::Policy(file.mdp.num_actions());
            const std::string prefix = q_dir.empty() ? "" : (std::filesystem::path(q_dir) / name).string();
            res.rows.push_back(certify(name, file.mdp, policy, m_bundled, cfg.gap_tolerance, prefix));
        } catch (const std::exception &e) {
            CertRow row;
            row.name = name;
            row.status = "error";
            row.message = e.what();
            res.rows.push_back(row);
        }
    }
    auto generated = run_trials<CertRow>(cfg.random_mdps, [&](std::size_t i) {
        Rng rng(derive_seed(cfg.seed, "random-mdp", i));
        auto r = oracle::random_ergodic_mdp(rng);
        const std::size_t m = 1 + i % std::max<std::size_t>(1, cfg.max_horizon);
        return certify("random-" + std::to_string(i), r.mdp, r.policy, m, cfg.gap_tolerance, "");
    });
    res.rows.insert(res.rows.end(), generated.begin(), generated.end());
    return res;
}

void write_cert_report(std::ostream &out, const OracleCertResult &r) {
    out << "mdp,states,actions,horizon,irreducible,aperiodic,windows,residual,gap,status,message\n";
    for (const auto &row : r.rows) {
        std::string msg = row.message;
        for (char &c : msg) {
            if (c == ',' || c == '\n') {
                c = ';';
            }
        }
        out << row.name << ',' << row.states << ',' << row.actions << ',' << row.horizon << ','
            << row.irreducible << ',' << row.aperiodic << ',' << row.windows << ','
            << format_double(row.residual) << ',' << format_double(row.gap) << ',' << row.status
            << ',' << msg << '\n';
    }
}

} // namespace cnc::harness
