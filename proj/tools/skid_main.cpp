// Command-line front end: demonstration generation, training, evaluation,
// and trajectory-log export.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "skid/config.hpp"
#include "skid/errors.hpp"
#include "skid/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::string with_output_root(const std::string& path) {
    const char* root = std::getenv("SKID_OUTPUT_ROOT");
    if (root == nullptr || path.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(root) / path).string();
}

skid::RunConfig load_run_config(const std::string& config_path) {
    if (config_path.empty()) return skid::default_config();
    return skid::load_config_file(config_path);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw skid::IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

int cmd_gen_demos(const std::string& config_path, int episodes, const std::string& policy,
                  std::uint64_t seed, bool seed_set, const std::string& out_path,
                  const std::string& report_path) {
    skid::RunConfig cfg = load_run_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (episodes <= 0) episodes = 200;

    skid::Environment env(cfg.env);
    skid::DemoDataset dataset;
    skid::GenerationStats stats;
    const std::uint64_t demo_seed = skid::derive_seed(cfg.seed, "gen-demos");
    if (policy == "scripted") {
        stats = skid::generate_demo_dataset(env, cfg.demo_policy, episodes, demo_seed, dataset);
    } else if (policy == "ideal") {
        stats = skid::generate_demo_dataset(env, skid::DemoPolicyConfig::ideal(), episodes,
                                            demo_seed, dataset);
    } else if (policy == "random") {
        stats = skid::generate_random_dataset(env, episodes, demo_seed, dataset);
    } else {
        throw skid::ConfigError("unknown demonstrator policy: " + policy);
    }

    const std::string out = with_output_root(out_path);
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    dataset.save_file(out);

    std::printf("episodes        %d\n", stats.episodes);
    std::printf("success_rate    %.1f%%\n", 100.0 * stats.success_rate);
    std::printf("mean_epi_reward %.3f\n", stats.mean_episode_reward);
    std::printf("total_steps     %zu\n", stats.total_steps);
    std::printf("dataset         %s\n", out.c_str());

    if (!report_path.empty()) {
        write_json_file(with_output_root(report_path),
                        {{"episodes", stats.episodes},
                         {"successes", stats.successes},
                         {"success_rate", stats.success_rate},
                         {"mean_episode_reward", stats.mean_episode_reward},
                         {"total_steps", stats.total_steps},
                         {"policy", policy},
                         {"config_hash", cfg.hash()}});
    }
    return kExitOk;
}

template <class S>
int run_training(const skid::RunConfig& cfg, const std::string& demos_path) {
    skid::DemoDataset demos;
    const bool wants_demo = cfg.algorithm != skid::Algorithm::sac;
    if (!demos_path.empty()) {
        demos = skid::DemoDataset::load_file(demos_path);
        std::printf("demos           %zu episodes, r_bar %.3f\n", demos.episode_count(),
                    demos.mean_episode_reward());
    } else if (wants_demo) {
        throw skid::ConfigError("--demos is required for " +
                                std::string(skid::to_string(cfg.algorithm)));
    }

    skid::TrainerConfig tcfg = cfg.trainer;
    tcfg.out_dir = with_output_root(cfg.output_dir);
    skid::Trainer<S> trainer(cfg.env, cfg.algorithm, cfg.hyper, cfg.ablation, tcfg,
                             std::move(demos), cfg.seed);
    write_json_file(tcfg.out_dir + "/config.json", cfg.to_json());
    trainer.run();

    const auto& st = trainer.stats();
    std::printf("trained         %d episodes, %lld env steps, %lld grad steps\n", st.episodes,
                static_cast<long long>(st.env_steps), static_cast<long long>(st.grad_steps));
    std::printf("sddu_admissions %d\n", st.sddu_admissions);

    if (cfg.eval_episodes > 0) {
        skid::SuccessReport report = skid::evaluate(trainer.learner(), cfg.env, cfg.eval_episodes,
                                                    skid::derive_seed(cfg.seed, "final-eval"));
        report.config_hash = cfg.hash();
        std::printf("%s", report.table().c_str());
        write_json_file(tcfg.out_dir + "/report.json", report.to_json());
    }
    return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& algo, std::uint64_t seed,
              bool seed_set, int episodes, const std::string& demos_path,
              const std::string& out_dir, int qnfd, int sddu) {
    skid::RunConfig cfg = load_run_config(config_path);
    if (!algo.empty()) {
        const auto parsed = skid::parse_algorithm(algo);
        if (!parsed) throw skid::ConfigError("unknown algorithm: " + algo);
        cfg.algorithm = *parsed;
    }
    if (seed_set) cfg.seed = seed;
    if (episodes > 0) {
        cfg.episodes = episodes;
        cfg.trainer.episodes = episodes;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (qnfd >= 0) cfg.ablation.use_qnfd = qnfd != 0;
    if (sddu >= 0) cfg.ablation.use_sddu = sddu != 0;

    if (cfg.precision == "double") return run_training<double>(cfg, demos_path);
    return run_training<float>(cfg, demos_path);
}

template <class S>
int run_eval(const skid::RunConfig& cfg, const std::string& checkpoint, int episodes,
             const std::string& report_path, const std::string& log_path) {
    auto learner = skid::Learner<S>::load_checkpoint(checkpoint);
    skid::SuccessReport report =
        skid::evaluate(learner, cfg.env, episodes, skid::derive_seed(cfg.seed, "eval"),
                       log_path.empty() ? "" : with_output_root(log_path));
    report.config_hash = cfg.hash();
    std::printf("%s", report.table().c_str());
    if (!report_path.empty()) write_json_file(with_output_root(report_path), report.to_json());
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint, int episodes,
             std::uint64_t seed, bool seed_set, const std::string& report_path,
             const std::string& log_path) {
    skid::RunConfig cfg = load_run_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (episodes <= 0) episodes = cfg.eval_episodes;
    if (cfg.precision == "double") {
        return run_eval<double>(cfg, checkpoint, episodes, report_path, log_path);
    }
    return run_eval<float>(cfg, checkpoint, episodes, report_path, log_path);
}

// Flattens a trajectory JSONL log into a plot-ready CSV.
int cmd_replay_export(const std::string& log_path, const std::string& out_path) {
    std::ifstream in(log_path);
    if (!in) throw skid::IoError("cannot open: " + log_path);
    const std::string out_name = with_output_root(out_path);
    std::ofstream out(out_name);
    if (!out) throw skid::IoError("cannot open for writing: " + out_name);

    out << "episode,t,x,y,yaw,v_long,v_lat,beta_deg,delta_deg,pedal,steer_rate_cmd,reward,"
           "r_safe,r_prog,r_aux,r_term,terminal_cause\n";
    std::string line;
    int episode = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("type") && j["type"] == "header") {
            episode = j.value("episode", episode + 1);
            continue;
        }
        const auto& rc = j.at("reward_components");
        char buf[512];
        std::snprintf(
            buf, sizeof(buf),
            "%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n",
            episode, j.at("t").get<int>(), j.at("x").get<double>(), j.at("y").get<double>(),
            j.at("yaw").get<double>(), j.at("v_long").get<double>(), j.at("v_lat").get<double>(),
            j.at("beta_deg").get<double>(), j.at("delta_deg").get<double>(),
            j.at("pedal").get<double>(), j.at("steer_rate_cmd").get<double>(),
            j.at("reward").get<double>(), rc.at("safe").get<double>(), rc.at("prog").get<double>(),
            rc.at("aux").get<double>(), rc.at("term").get<double>(),
            j.at("terminal_cause").get<std::string>().c_str());
        out << buf;
    }
    std::printf("wrote %s\n", out_name.c_str());
    return kExitOk;
}

// Coarse grid search used once to pick the shipped demonstrator defaults.
int cmd_tune_demos(const std::string& config_path, int episodes, std::uint64_t seed) {
    skid::RunConfig cfg = load_run_config(config_path);
    if (episodes <= 0) episodes = 100;
    std::printf("gain,delay,noise,panic,success_rate\n");
    for (double gain : {0.5, 0.8, 1.2, 1.6}) {
        for (int delay : {0, 3, 6, 8}) {
            for (double noise : {0.0, 0.15, 0.25}) {
                skid::DemoPolicyConfig dp = cfg.demo_policy;
                dp.countersteer_gain = gain;
                dp.reaction_delay_steps = delay;
                dp.action_noise_std = noise;
                skid::Environment env(cfg.env);
                skid::DemoDataset ds;
                const auto stats = skid::generate_demo_dataset(env, dp, episodes,
                                                               skid::derive_seed(seed, "tune"), ds);
                std::printf("%.1f,%d,%.2f,%.2f,%.3f\n", gain, delay, noise, dp.panic_brake_prob,
                            stats.success_rate);
                std::fflush(stdout);
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oversteer-control benchmark and hybrid-learning trainer"};
    app.require_subcommand(1);

    std::string config_path, algo, demos_path, out_path, report_path, log_path, checkpoint, policy;
    std::uint64_t seed = 0;
    int episodes = 0;
    int qnfd = -1, sddu = -1;

    auto* gen = app.add_subcommand("gen-demos", "generate a demonstration dataset");
    gen->add_option("--config", config_path, "config file (JSON)");
    gen->add_option("--episodes", episodes, "episode count (default 200)");
    gen->add_option("--policy", policy, "scripted | ideal | random")->default_val("scripted");
    auto* gen_seed = gen->add_option("--seed", seed, "master seed override");
    gen->add_option("--out", out_path, "output dataset file")->default_val("demos.bin");
    gen->add_option("--report", report_path, "write a JSON generation report");

    auto* train = app.add_subcommand("train", "train a policy");
    train->add_option("--config", config_path, "config file (JSON)");
    train->add_option("--algo", algo, "qcsac | bcsac | sac | bc");
    auto* train_seed = train->add_option("--seed", seed, "master seed override");
    train->add_option("--episodes", episodes, "episode budget override");
    train->add_option("--demos", demos_path, "demonstration dataset file");
    train->add_option("--out", out_path, "output directory override");
    train->add_flag_callback(
        "--qnfd", [&qnfd] { qnfd = 1; }, "enable Q-network-from-demonstration");
    train->add_flag_callback(
        "--no-qnfd", [&qnfd] { qnfd = 0; }, "disable it");
    train->add_flag_callback(
        "--sddu", [&sddu] { sddu = 1; }, "enable selective demo updates");
    train->add_flag_callback(
        "--no-sddu", [&sddu] { sddu = 0; }, "disable them");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--config", config_path, "config file (JSON)");
    eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    eval->add_option("--episodes", episodes, "evaluation episode count");
    auto* eval_seed = eval->add_option("--seed", seed, "master seed override");
    eval->add_option("--out", report_path, "write the report as JSON");
    eval->add_option("--log", log_path, "write a trajectory log (JSON lines)");

    auto* rexp = app.add_subcommand("replay-export", "convert a trajectory log to CSV");
    rexp->add_option("--log", log_path, "trajectory log file")->required();
    rexp->add_option("--out", out_path, "output CSV")->default_val("trajectory.csv");

    auto* tune = app.add_subcommand("tune-demos", "grid-search demonstrator gains");
    tune->add_option("--config", config_path, "config file (JSON)");
    tune->add_option("--episodes", episodes, "episodes per grid point");
    tune->add_option("--seed", seed, "search seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_demos(config_path, episodes, policy, seed, !gen_seed->empty(), out_path,
                                 report_path);
        }
        if (train->parsed()) {
            return cmd_train(config_path, algo, seed, !train_seed->empty(), episodes, demos_path,
                             out_path, qnfd, sddu);
        }
        if (eval->parsed()) {
            return cmd_eval(config_path, checkpoint, episodes, seed, !eval_seed->empty(),
                            report_path, log_path);
        }
        if (rexp->parsed()) return cmd_replay_export(log_path, out_path);
        if (tune->parsed()) return cmd_tune_demos(config_path, episodes, seed);
    } catch (const skid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const skid::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const skid::PhysicsFault& e) {
        std::cerr << "numeric fault: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
