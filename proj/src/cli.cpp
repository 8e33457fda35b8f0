#include "phishdqn/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "phishdqn/agent.hpp"
#include "phishdqn/dataset.hpp"
#include "phishdqn/errors.hpp"
#include "phishdqn/features.hpp"
#include "phishdqn/metrics.hpp"
#include "phishdqn/network.hpp"
#include "phishdqn/url.hpp"

namespace phishdqn::cli {
namespace {

// Internal control-flow carrier: the top-level handler turns it into the
// process exit code after printing the message.
struct CliError {
    int code;
    std::string message;
};

struct RawOpts {
    std::string corpus;
    std::string evidence;
    std::string model;
    std::string out;
    std::string config_file;
    std::string url;
    std::uint64_t seed = 42;
    std::uint64_t episodes = 10;
    std::uint64_t epsilon_decay_steps = 10000;
    std::uint64_t target_sync_every = 500;
    std::uint64_t batch_size = 32;
    std::uint64_t replay_capacity = 10000;
    std::uint64_t learn_start = 500;
    std::uint64_t folds = 2;
    double gamma = 0.9;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double split_ratio = 0.8;
    std::string on_parse_error = "skip";
    std::string missing_evidence = "benign";
};

// Option handles needed to tell "flag passed" from "default value", so a
// config file can fill anything the command line left untouched.
struct FlagRefs {
    CLI::Option* seed = nullptr;
    CLI::Option* episodes = nullptr;
    CLI::Option* gamma = nullptr;
    CLI::Option* epsilon_start = nullptr;
    CLI::Option* epsilon_end = nullptr;
    CLI::Option* epsilon_decay_steps = nullptr;
    CLI::Option* batch_size = nullptr;
    CLI::Option* target_sync_every = nullptr;
    CLI::Option* replay_capacity = nullptr;
    CLI::Option* learn_start = nullptr;
};

bool passed(const CLI::Option* opt) {
    return opt != nullptr && opt->count() > 0;
}

void add_seed_flag(CLI::App* sub, RawOpts& o, FlagRefs& f) {
    f.seed = sub->add_option("--seed", o.seed,
                             "Random seed (overrides config file and PHISHDQN_SEED)");
}

void add_policy_flags(CLI::App* sub, RawOpts& o) {
    sub->add_option("--on-parse-error", o.on_parse_error,
                    "What to do with rows whose URL does not parse")
        ->check(CLI::IsMember({"skip", "suspicious"}));
    sub->add_option("--missing-evidence", o.missing_evidence,
                    "How unobserved evidence slots resolve")
        ->check(CLI::IsMember({"benign", "suspicious", "error"}));
}

void add_agent_flags(CLI::App* sub, RawOpts& o, FlagRefs& f) {
    f.episodes = sub->add_option("--episodes", o.episodes, "Training episodes (epochs)")
                     ->check(CLI::PositiveNumber);
    f.gamma = sub->add_option("--gamma", o.gamma, "Discount factor")
                  ->check(CLI::Range(0.0, 1.0));
    f.epsilon_start = sub->add_option("--epsilon-start", o.epsilon_start,
                                      "Exploration rate at step 0")
                          ->check(CLI::Range(0.0, 1.0));
    f.epsilon_end = sub->add_option("--epsilon-end", o.epsilon_end,
                                    "Exploration rate after decay")
                        ->check(CLI::Range(0.0, 1.0));
    f.epsilon_decay_steps = sub->add_option("--epsilon-decay-steps", o.epsilon_decay_steps,
                                            "Steps over which exploration decays linearly");
    f.batch_size = sub->add_option("--batch-size", o.batch_size, "Minibatch size")
                       ->check(CLI::PositiveNumber);
    f.target_sync_every =
        sub->add_option("--target-sync", o.target_sync_every,
                        "Gradient steps between target-network refreshes (0 = episode "
                        "starts only)");
    f.replay_capacity = sub->add_option("--capacity", o.replay_capacity,
                                        "Replay memory capacity")
                            ->check(CLI::PositiveNumber);
    f.learn_start = sub->add_option("--learn-start", o.learn_start,
                                    "Replay fill level before gradient steps begin");
    sub->add_option("--config", o.config_file,
                    "JSON file with agent settings; explicit flags win");
}

MissingEvidencePolicy to_policy(const std::string& name) {
    if (name == "benign") {
        return MissingEvidencePolicy::benign_default;
    }
    if (name == "suspicious") {
        return MissingEvidencePolicy::suspicious_default;
    }
    return MissingEvidencePolicy::error_on_missing;
}

ParseErrorAction to_parse_action(const std::string& name) {
    return name == "suspicious" ? ParseErrorAction::suspicious : ParseErrorAction::skip;
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("PHISHDQN_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0') {
        throw CliError{kExitData,
                       "PHISHDQN_SEED is not an unsigned integer: " + std::string(raw)};
    }
    return static_cast<std::uint64_t>(v);
}

// Accepts exactly the agent settings by name; unknown keys are rejected so
// typos cannot silently fall back to defaults.
void overlay_config_file(AgentConfig& c, const std::string& path,
                         std::optional<std::uint64_t>& file_seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CliError{kExitData, "config file is not valid JSON: " + std::string(e.what())};
    }
    if (!j.is_object()) {
        throw CliError{kExitData, "config file must hold a JSON object"};
    }
    static const std::set<std::string> known = {
        "gamma",      "epsilon_start",     "epsilon_end", "epsilon_decay_steps",
        "batch_size", "target_sync_every", "episodes",    "replay_capacity",
        "learn_start", "seed"};
    for (const auto& item : j.items()) {
        if (known.find(item.key()) == known.end()) {
            throw CliError{kExitData, "config file has an unknown setting: " + item.key()};
        }
    }
    try {
        if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
        if (j.contains("epsilon_start")) c.epsilon_start = j.at("epsilon_start").get<double>();
        if (j.contains("epsilon_end")) c.epsilon_end = j.at("epsilon_end").get<double>();
        if (j.contains("epsilon_decay_steps"))
            c.epsilon_decay_steps = j.at("epsilon_decay_steps").get<std::uint64_t>();
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
        if (j.contains("target_sync_every"))
            c.target_sync_every = j.at("target_sync_every").get<std::uint64_t>();
        if (j.contains("episodes")) c.episodes = j.at("episodes").get<std::uint64_t>();
        if (j.contains("replay_capacity"))
            c.replay_capacity = j.at("replay_capacity").get<std::size_t>();
        if (j.contains("learn_start")) c.learn_start = j.at("learn_start").get<std::size_t>();
        if (j.contains("seed")) file_seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw CliError{kExitData, "config file has a mistyped value: " + std::string(e.what())};
    }
}

void validate_agent_config(const AgentConfig& c) {
    if (c.episodes == 0) {
        throw CliError{kExitData, "episodes must be at least 1"};
    }
    if (c.batch_size == 0 || c.replay_capacity == 0) {
        throw CliError{kExitData, "batch size and replay capacity must be at least 1"};
    }
    if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) {
        throw CliError{kExitData, "gamma must lie in [0, 1]"};
    }
    if (!(c.epsilon_end >= 0.0 && c.epsilon_start <= 1.0 &&
          c.epsilon_end <= c.epsilon_start)) {
        throw CliError{kExitData, "epsilon bounds must satisfy 0 <= end <= start <= 1"};
    }
}

// Precedence: explicit flag, then config file, then PHISHDQN_SEED, then 42.
std::uint64_t resolve_seed(const FlagRefs& f, const RawOpts& o,
                           const std::optional<std::uint64_t>& file_seed) {
    if (passed(f.seed)) {
        return o.seed;
    }
    if (file_seed) {
        return *file_seed;
    }
    if (const auto env = env_seed()) {
        return *env;
    }
    return 42;
}

AgentConfig build_agent_config(const RawOpts& o, const FlagRefs& f) {
    AgentConfig c;
    std::optional<std::uint64_t> file_seed;
    if (!o.config_file.empty()) {
        overlay_config_file(c, o.config_file, file_seed);
    }
    if (passed(f.episodes)) c.episodes = o.episodes;
    if (passed(f.gamma)) c.gamma = o.gamma;
    if (passed(f.epsilon_start)) c.epsilon_start = o.epsilon_start;
    if (passed(f.epsilon_end)) c.epsilon_end = o.epsilon_end;
    if (passed(f.epsilon_decay_steps)) c.epsilon_decay_steps = o.epsilon_decay_steps;
    if (passed(f.batch_size)) c.batch_size = static_cast<std::size_t>(o.batch_size);
    if (passed(f.target_sync_every)) c.target_sync_every = o.target_sync_every;
    if (passed(f.replay_capacity)) c.replay_capacity = static_cast<std::size_t>(o.replay_capacity);
    if (passed(f.learn_start)) c.learn_start = static_cast<std::size_t>(o.learn_start);
    c.seed = resolve_seed(f, o, file_seed);
    validate_agent_config(c);
    return c;
}

nlohmann::json agent_config_json(const AgentConfig& c) {
    return nlohmann::json{{"gamma", c.gamma},
                          {"epsilon_start", c.epsilon_start},
                          {"epsilon_end", c.epsilon_end},
                          {"epsilon_decay_steps", c.epsilon_decay_steps},
                          {"batch_size", c.batch_size},
                          {"target_sync_every", c.target_sync_every},
                          {"episodes", c.episodes},
                          {"replay_capacity", c.replay_capacity},
                          {"learn_start", c.learn_start},
                          {"seed", c.seed},
                          {"hidden_dims", c.network.hidden_dims}};
}

void emit_json(const nlohmann::json& j, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open output file for writing: " + out_path);
    }
    file << j.dump(2) << '\n';
    if (!file) {
        throw IoError("failed while writing output file: " + out_path);
    }
}

LoadedModel load_model_checked(const std::string& path) {
    try {
        return load_params(path);
    } catch (const VersionMismatch& e) {
        throw CliError{kExitIncompatibleModel, e.what()};
    } catch (const CorruptFile& e) {
        throw CliError{kExitIncompatibleModel, e.what()};
    }
}

VectorizeResult vectorize_corpus(const RawOpts& o) {
    const auto records = load_csv(o.corpus);
    auto result = vectorize(records, std::filesystem::path(o.evidence),
                            to_policy(o.missing_evidence), to_parse_action(o.on_parse_error));
    if (result.data.samples.empty()) {
        throw EmptyInput("no usable rows in corpus: " + o.corpus);
    }
    return result;
}

void print_skips(const VectorizeResult& v, std::ostream& err) {
    constexpr std::size_t kMaxListed = 20;
    for (std::size_t i = 0; i < v.skipped.size() && i < kMaxListed; ++i) {
        const auto& s = v.skipped[i];
        err << "  skipped row " << s.row_index << " (" << s.url << "): " << s.reason << '\n';
    }
    if (v.skipped.size() > kMaxListed) {
        err << "  ... " << (v.skipped.size() - kMaxListed) << " more skipped rows\n";
    }
}

RelevanceReport evaluate(const NetworkParams& params, const VectorizedDataset& data) {
    std::vector<int> preds;
    std::vector<int> labels;
    preds.reserve(data.samples.size());
    labels.reserve(data.samples.size());
    for (const Sample& s : data.samples) {
        preds.push_back(classify(params, s.features).label);
        labels.push_back(s.label);
    }
    return report(confusion(preds, labels));
}

nlohmann::json loss_summary(const std::vector<double>& trace) {
    nlohmann::json j;
    j["count"] = trace.size();
    if (trace.empty()) {
        j["first"] = nullptr;
        j["last"] = nullptr;
        j["mean"] = nullptr;
        return j;
    }
    double sum = 0.0;
    for (double v : trace) {
        sum += v;
    }
    j["first"] = trace.front();
    j["last"] = trace.back();
    j["mean"] = sum / static_cast<double>(trace.size());
    return j;
}

int cmd_extract(const RawOpts& o, const FlagRefs& f, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(f, o, std::nullopt);
    const auto result = vectorize_corpus(o);
    write_feature_csv(o.out, result.data);
    write_mask_csv(o.out + ".mask", result.data);
    err << "extracted " << result.data.samples.size() << " rows ("
        << result.data.benign_count << " benign, " << result.data.phishing_count
        << " phishing); skipped " << result.skipped.size() << "; defaulted slots "
        << result.defaulted_slot_count << "; suspicious fallbacks "
        << result.suspicious_fallback_count << "; seed " << seed << '\n';
    print_skips(result, err);
    err << "wrote " << o.out << " and " << o.out << ".mask\n";
    return kExitOk;
}

int cmd_train(const RawOpts& o, const FlagRefs& f, std::ostream& out, std::ostream& err) {
    AgentConfig cfg = build_agent_config(o, f);
    const auto vec = vectorize_corpus(o);
    const SplitPlan plan = split(vec.data, o.split_ratio, cfg.seed);
    const VectorizedDataset train_set = subset(vec.data, plan.train_indices);
    const VectorizedDataset test_set = subset(vec.data, plan.test_indices);

    const TrainResult result = train(train_set, cfg);
    const RelevanceReport test_report = evaluate(result.params, test_set);

    nlohmann::json meta;
    meta["agent_config"] = agent_config_json(cfg);
    meta["split_ratio"] = o.split_ratio;
    meta["train_size"] = train_set.samples.size();
    meta["test_size"] = test_set.samples.size();
    meta["corpus_rows"] = vec.data.samples.size() + vec.skipped.size();
    meta["skipped_rows"] = vec.skipped.size();
    meta["missing_evidence_policy"] = o.missing_evidence;
    meta["on_parse_error"] = o.on_parse_error;
    save_params(result.params, o.model, &result.adam, &meta);

    nlohmann::json stats;
    stats["seed"] = cfg.seed;
    stats["agent_config"] = agent_config_json(cfg);
    stats["split"] = {{"ratio", o.split_ratio},
                      {"train_size", train_set.samples.size()},
                      {"test_size", test_set.samples.size()}};
    stats["skipped_rows"] = vec.skipped.size();
    stats["defaulted_slots"] = vec.defaulted_slot_count;
    stats["suspicious_fallbacks"] = vec.suspicious_fallback_count;
    stats["episode_reward"] = result.stats.episode_reward;
    stats["episode_accuracy"] = result.stats.episode_accuracy;
    stats["epsilon_trace"] = result.stats.epsilon_trace;
    stats["loss"] = loss_summary(result.stats.loss_trace);
    stats["transitions_stored"] = result.stats.transitions_stored;
    stats["gradient_steps"] = result.stats.gradient_steps;
    stats["test_report"] = report_json(test_report);
    emit_json(stats, o.out, out);

    for (std::size_t k = 0; k < result.stats.episode_reward.size(); ++k) {
        err << "episode " << (k + 1) << "/" << result.stats.episode_reward.size() << "  reward "
            << result.stats.episode_reward[k] << "  accuracy "
            << result.stats.episode_accuracy[k] << '\n';
    }
    err << "test split results:\n" << report_table(test_report);
    err << "model written to " << o.model << '\n';
    return kExitOk;
}

int cmd_eval(const RawOpts& o, const FlagRefs& f, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(f, o, std::nullopt);
    const LoadedModel model = load_model_checked(o.model);
    const auto vec = vectorize_corpus(o);
    const RelevanceReport rep = evaluate(model.params, vec.data);

    nlohmann::json j;
    j["seed"] = seed;
    j["evaluated"] = vec.data.samples.size();
    j["skipped_rows"] = vec.skipped.size();
    j["report"] = report_json(rep);
    emit_json(j, o.out, out);
    err << report_table(rep);
    return kExitOk;
}

int cmd_crossval(const RawOpts& o, const FlagRefs& f, std::ostream& out, std::ostream& err) {
    AgentConfig base_cfg = build_agent_config(o, f);
    const auto vec = vectorize_corpus(o);
    const auto plans = kfold(vec.data, static_cast<std::size_t>(o.folds), base_cfg.seed);

    // The k test sides must tile the dataset exactly; recomputed here so the
    // output carries a verified claim rather than an assumption.
    std::vector<bool> seen(vec.data.samples.size(), false);
    bool disjoint = true;
    std::size_t covered = 0;
    for (const auto& plan : plans) {
        for (std::size_t idx : plan.test_indices) {
            if (seen[idx]) {
                disjoint = false;
            } else {
                seen[idx] = true;
                ++covered;
            }
        }
    }

    nlohmann::json fold_reports = nlohmann::json::array();
    std::vector<RelevanceReport> reports;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        AgentConfig cfg = base_cfg;
        cfg.seed = base_cfg.seed + i;
        const VectorizedDataset train_set = subset(vec.data, plans[i].train_indices);
        const VectorizedDataset test_set = subset(vec.data, plans[i].test_indices);
        const TrainResult result = train(train_set, cfg);
        const RelevanceReport rep = evaluate(result.params, test_set);
        reports.push_back(rep);

        nlohmann::json fj;
        fj["fold"] = i;
        fj["seed"] = cfg.seed;
        fj["train_size"] = train_set.samples.size();
        fj["test_size"] = test_set.samples.size();
        fj["report"] = report_json(rep);
        fold_reports.push_back(std::move(fj));

        err << "fold " << i << " (train " << train_set.samples.size() << ", test "
            << test_set.samples.size() << "):\n"
            << report_table(rep);
    }

    // Field-wise mean over the folds where the measure is defined; the
    // defined counts make a partial mean visible instead of silent.
    auto mean_of = [&reports](std::optional<double> RelevanceReport:: *field) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& r : reports) {
            if (r.*field) {
                sum += *(r.*field);
                ++count;
            }
        }
        std::pair<nlohmann::json, std::size_t> res{nullptr, count};
        if (count > 0) {
            res.first = sum / static_cast<double>(count);
        }
        return res;
    };
    const auto [mp, cp] = mean_of(&RelevanceReport::precision);
    const auto [mr, cr] = mean_of(&RelevanceReport::recall);
    const auto [ma, ca] = mean_of(&RelevanceReport::accuracy);
    const auto [mf, cf] = mean_of(&RelevanceReport::f_score);

    nlohmann::json j;
    j["seed"] = base_cfg.seed;
    j["folds"] = plans.size();
    j["agent_config"] = agent_config_json(base_cfg);
    j["skipped_rows"] = vec.skipped.size();
    j["fold_reports"] = std::move(fold_reports);
    j["mean"] = {{"precision", mp}, {"recall", mr}, {"accuracy", ma}, {"f_score", mf}};
    j["mean_defined_counts"] = {{"precision", cp}, {"recall", cr}, {"accuracy", ca},
                                {"f_score", cf}};
    j["test_sets_disjoint"] = disjoint;
    j["test_sets_cover_dataset"] = (disjoint && covered == vec.data.samples.size());
    emit_json(j, o.out, out);

    err << "mean accuracy over " << plans.size() << " folds: ";
    if (ma.is_null()) {
        err << "n/a\n";
    } else {
        err << ma.get<double>() << '\n';
    }
    return kExitOk;
}

int cmd_classify(const RawOpts& o, const FlagRefs& f, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(f, o, std::nullopt);
    const LoadedModel model = load_model_checked(o.model);

    EvidenceCache cache;
    if (!o.evidence.empty()) {
        cache = load_evidence_cache(o.evidence);
    }

    FeatureVector features;
    try {
        const ParsedUrl parsed = parse_url(o.url);
        HostEvidence evidence;
        if (const auto it = cache.find(o.url); it != cache.end()) {
            evidence = it->second;
        }
        features = extract_features(parsed, evidence, to_policy(o.missing_evidence));
    } catch (const MalformedUrl& e) {
        emit_json(nlohmann::json{{"error", e.what()}, {"url", o.url}}, o.out, out);
        throw CliError{kExitData, e.what()};
    } catch (const MissingEvidence& e) {
        emit_json(nlohmann::json{{"error", e.what()}, {"url", o.url}}, o.out, out);
        throw CliError{kExitData, e.what()};
    }

    const Classification verdict = classify(model.params, features);
    nlohmann::json j;
    j["seed"] = seed;
    j["url"] = o.url;
    j["label"] = verdict.label;
    j["q_phishing"] = verdict.q_phishing;
    j["features"] = std::vector<int>(features.values.begin(), features.values.end());
    j["evidence_mask"] = std::vector<bool>(features.evidence_mask.begin(),
                                           features.evidence_mask.end());
    emit_json(j, o.out, out);
    err << (verdict.label == 1 ? "phishing" : "benign") << " (q_phishing = "
        << verdict.q_phishing << ")\n";
    return verdict.label == 1 ? kExitPhishing : kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phishing URL detector: lexical/host feature extraction and a"
                 " replay-trained Q-network classifier"};
    app.name("phishdqn");
    app.require_subcommand(1);

    RawOpts o;
    FlagRefs extract_f, train_f, eval_f, crossval_f, classify_f;

    CLI::App* extract = app.add_subcommand(
        "extract", "Extract feature vectors from a URL corpus into CSV");
    extract->add_option("--corpus", o.corpus, "CSV corpus of url,label rows")->required();
    extract->add_option("--evidence", o.evidence, "JSON-lines host evidence cache");
    extract->add_option("--out", o.out, "Feature CSV path (mask sidecar gets .mask)")
        ->required();
    add_policy_flags(extract, o);
    add_seed_flag(extract, o, extract_f);

    CLI::App* train_cmd = app.add_subcommand(
        "train", "Train a detector on a corpus with a held-out split");
    train_cmd->add_option("--corpus", o.corpus, "CSV corpus of url,label rows")->required();
    train_cmd->add_option("--evidence", o.evidence, "JSON-lines host evidence cache");
    train_cmd->add_option("--model", o.model, "Where to write the trained model")->required();
    train_cmd->add_option("--out", o.out, "Stats JSON path (default: stdout)");
    train_cmd->add_option("--split-ratio", o.split_ratio, "Train-side fraction")
        ->check(CLI::Range(0.0, 1.0));
    add_policy_flags(train_cmd, o);
    add_seed_flag(train_cmd, o, train_f);
    add_agent_flags(train_cmd, o, train_f);

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate a trained model on a labeled corpus");
    eval_cmd->add_option("--corpus", o.corpus, "CSV corpus of url,label rows")->required();
    eval_cmd->add_option("--evidence", o.evidence, "JSON-lines host evidence cache");
    eval_cmd->add_option("--model", o.model, "Trained model file")->required();
    eval_cmd->add_option("--out", o.out, "Report JSON path (default: stdout)");
    add_policy_flags(eval_cmd, o);
    add_seed_flag(eval_cmd, o, eval_f);

    CLI::App* crossval = app.add_subcommand(
        "crossval", "Stratified k-fold cross-validation (train + evaluate per fold)");
    crossval->add_option("--corpus", o.corpus, "CSV corpus of url,label rows")->required();
    crossval->add_option("--evidence", o.evidence, "JSON-lines host evidence cache");
    crossval->add_option("--out", o.out, "Report JSON path (default: stdout)");
    crossval->add_option("--folds", o.folds, "Number of folds")
        ->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));
    add_policy_flags(crossval, o);
    add_seed_flag(crossval, o, crossval_f);
    add_agent_flags(crossval, o, crossval_f);

    CLI::App* classify_cmd =
        app.add_subcommand("classify", "Classify one URL with a trained model");
    classify_cmd->add_option("url", o.url, "URL to classify")->required();
    classify_cmd->add_option("--model", o.model, "Trained model file")->required();
    classify_cmd->add_option("--evidence", o.evidence, "JSON-lines host evidence cache");
    classify_cmd->add_option("--out", o.out, "Verdict JSON path (default: stdout)");
    add_policy_flags(classify_cmd, o);
    add_seed_flag(classify_cmd, o, classify_f);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return e.get_exit_code();
    }

    try {
        if (extract->parsed()) {
            return cmd_extract(o, extract_f, err);
        }
        if (train_cmd->parsed()) {
            return cmd_train(o, train_f, out, err);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(o, eval_f, out, err);
        }
        if (crossval->parsed()) {
            return cmd_crossval(o, crossval_f, out, err);
        }
        return cmd_classify(o, classify_f, out, err);
    } catch (const CliError& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NonFiniteLoss& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const VersionMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kExitIncompatibleModel;
    } catch (const std::exception& e) {
        // Remaining library errors (bad labels, malformed rows, degenerate
        // splits, corrupt evidence files) are data problems.
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace phishdqn::cli
