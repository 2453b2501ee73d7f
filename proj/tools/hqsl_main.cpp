// Command-line surface for the hybrid quantum split-learning framework:
// training (in-process or tcp), evaluation with optional defense and
// depolarizing noise, the circuit comparison sweep, and the reconstruction
// attack harness. Configuration is a JSON document; reports are CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hqsl/attack/attack.hpp"
#include "hqsl/common/rng.hpp"
#include "hqsl/dataio/dataset.hpp"
#include "hqsl/defense/laplace.hpp"
#include "hqsl/models/metrics.hpp"
#include "hqsl/models/split_model.hpp"
#include "hqsl/neural/checkpoint.hpp"
#include "hqsl/qlayer/circuit.hpp"
#include "hqsl/splitproto/trainer.hpp"

namespace {

using json = nlohmann::json;
using namespace hqsl;

constexpr double kPi = 3.14159265358979323846;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("HQSL_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "quiet") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << msg << "\n";
}

// ------------------------------------------------------------------ config

struct DatasetSpec {
    std::string kind = "blobs";  // blobs | moons | shapes | csv | idx
    std::size_t n = 1000;
    std::size_t features = 7;
    int classes = 2;
    double separation = 4.0;
    double noise = 0.1;
    std::string path;              // csv
    std::string images, labels;    // idx
    std::vector<std::size_t> feature_columns;
    std::optional<std::size_t> label_column;
};

struct TransportSpec {
    std::string kind = "in-process";  // in-process | tcp
    std::string host = "127.0.0.1";
    int port = 9000;
};

struct RunConfig {
    int variant = 1;
    std::string server_front = "quantum";  // quantum | classical
    int circuit_id = 6;
    DatasetSpec dataset;
    int folds = 5;
    int epochs = 20;
    double lr = 1e-3;
    int batch_size = 32;
    std::uint64_t seed = 42;
    int clients = 1;
    TransportSpec transport;
    std::string eval_mode = "analytic";  // analytic | shots
    int shots = 1000;
    double noise_p1 = 0.0;
    double noise_p2 = 0.0;
    std::optional<defense::LaplaceNoiseConfig> defense;
    int attack_model_id = 3;
    int attack_epochs = 60;
};

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

DatasetSpec parse_dataset(const json& j) {
    DatasetSpec spec;
    if (j.is_string()) {  // path shorthand: csv with the last column as label
        spec.kind = "csv";
        spec.path = j.get<std::string>();
        return spec;
    }
    reject_unknown(j, {"kind", "n", "features", "classes", "separation", "noise", "path",
                       "images", "labels", "feature_columns", "label_column"},
                   "dataset");
    spec.kind = j.value("kind", spec.kind);
    spec.n = j.value("n", spec.n);
    spec.features = j.value("features", spec.features);
    spec.classes = j.value("classes", spec.classes);
    spec.separation = j.value("separation", spec.separation);
    spec.noise = j.value("noise", spec.noise);
    spec.path = j.value("path", spec.path);
    spec.images = j.value("images", spec.images);
    spec.labels = j.value("labels", spec.labels);
    if (j.contains("feature_columns")) {
        spec.feature_columns = j["feature_columns"].get<std::vector<std::size_t>>();
    }
    if (j.contains("label_column")) spec.label_column = j["label_column"].get<std::size_t>();
    return spec;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    reject_unknown(j, {"variant", "server_front", "circuit_id", "dataset", "folds", "epochs",
                       "lr", "batch_size", "seed", "clients", "transport", "eval_mode",
                       "shots", "noise", "defense", "attack"},
                   "config");
    RunConfig c;
    c.variant = j.value("variant", c.variant);
    c.server_front = j.value("server_front", c.server_front);
    c.circuit_id = j.value("circuit_id", c.circuit_id);
    if (j.contains("dataset")) c.dataset = parse_dataset(j["dataset"]);
    c.folds = j.value("folds", c.folds);
    c.epochs = j.value("epochs", c.epochs);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.clients = j.value("clients", c.clients);
    if (j.contains("transport")) {
        const auto& t = j["transport"];
        reject_unknown(t, {"kind", "host", "port"}, "transport");
        c.transport.kind = t.value("kind", c.transport.kind);
        c.transport.host = t.value("host", c.transport.host);
        c.transport.port = t.value("port", c.transport.port);
    }
    c.eval_mode = j.value("eval_mode", c.eval_mode);
    c.shots = j.value("shots", c.shots);
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        reject_unknown(n, {"p1", "p2"}, "noise");
        c.noise_p1 = n.value("p1", 0.0);
        c.noise_p2 = n.value("p2", 0.0);
    }
    if (j.contains("defense") && !j["defense"].is_null()) {
        const auto& d = j["defense"];
        reject_unknown(d, {"mu_over_pi", "b", "seed"}, "defense");
        defense::LaplaceNoiseConfig cfg;
        cfg.mu = d.value("mu_over_pi", 4.0) * kPi;
        cfg.b = d.value("b", 0.01);
        cfg.seed = d.value("seed", std::uint64_t{7});
        if (cfg.b <= 0.0) throw ConfigError("defense.b must be > 0");
        c.defense = cfg;
    }
    if (j.contains("attack")) {
        const auto& a = j["attack"];
        reject_unknown(a, {"model_id", "epochs"}, "attack");
        c.attack_model_id = a.value("model_id", c.attack_model_id);
        c.attack_epochs = a.value("epochs", c.attack_epochs);
    }

    if (c.variant != 1 && c.variant != 2) throw ConfigError("variant must be 1 or 2");
    if (c.server_front != "quantum" && c.server_front != "classical") {
        throw ConfigError("server_front must be quantum or classical");
    }
    if (c.circuit_id < 1 || c.circuit_id > 10) throw ConfigError("circuit_id must be 1..10");
    if (c.folds < 2) throw ConfigError("folds must be >= 2");
    if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (c.clients < 1) throw ConfigError("clients must be >= 1");
    if (c.eval_mode != "analytic" && c.eval_mode != "shots") {
        throw ConfigError("eval_mode must be analytic or shots");
    }
    if (c.shots < 1) throw ConfigError("shots must be >= 1");
    if (c.noise_p1 < 0.0 || c.noise_p1 > 1.0 || c.noise_p2 < 0.0 || c.noise_p2 > 1.0) {
        throw ConfigError("noise probabilities must be in [0, 1]");
    }
    if (c.transport.kind != "in-process" && c.transport.kind != "tcp") {
        throw ConfigError("transport.kind must be in-process or tcp");
    }
    if (c.transport.kind == "tcp" && c.clients != 1) {
        throw ConfigError("tcp transport supports a single client; use in-process for K > 1");
    }
    return c;
}

// ------------------------------------------------------------------ pipeline

dataio::Dataset build_dataset(const RunConfig& c) {
    const auto& d = c.dataset;
    if (d.kind == "blobs") {
        return dataio::min_max_normalize(
            dataio::make_blobs(d.n, d.features, d.classes, d.separation, c.seed));
    }
    if (d.kind == "moons") {
        return dataio::min_max_normalize(dataio::make_moons(d.n, c.seed, d.noise));
    }
    if (d.kind == "shapes") {
        return dataio::make_shape_images(d.n, d.classes, c.seed);
    }
    if (d.kind == "csv") {
        if (d.path.empty()) throw ConfigError("csv dataset needs a path");
        // column defaults: last column is the label, the rest are features
        std::vector<std::size_t> cols = d.feature_columns;
        std::size_t label = 0;
        if (d.label_column) {
            label = *d.label_column;
        } else {
            std::ifstream probe(d.path);
            std::string first;
            if (!probe || !std::getline(probe, first)) {
                throw ConfigError("cannot read csv: " + d.path);
            }
            label = static_cast<std::size_t>(
                std::count(first.begin(), first.end(), ','));
        }
        if (cols.empty()) {
            for (std::size_t i = 0; i < label; ++i) cols.push_back(i);
        }
        auto ds = dataio::load_csv(d.path, cols, label);
        if (ds.feature_dim() > 7) {
            log_info("reducing " + std::to_string(ds.feature_dim()) + " features to 7 via pca");
            ds = dataio::pca_reduce(ds, 7).dataset;
        }
        return dataio::min_max_normalize(ds);
    }
    if (d.kind == "idx") {
        if (d.images.empty() || d.labels.empty()) {
            throw ConfigError("idx dataset needs images and labels paths");
        }
        return dataio::load_idx(d.images, d.labels);
    }
    throw ConfigError("unknown dataset kind: " + d.kind);
}

models::VariantConfig variant_config(const RunConfig& c, const dataio::Dataset& data) {
    if (c.variant == 1) {
        if (data.is_image()) throw ConfigError("variant 1 expects flat feature data");
        if (data.feature_dim() != 7) {
            throw ConfigError("variant 1 expects 7 features, dataset has " +
                              std::to_string(data.feature_dim()));
        }
    } else if (!data.is_image()) {
        throw ConfigError("variant 2 expects an image dataset");
    }
    models::VariantConfig v;
    v.variant = c.variant;
    v.num_classes = c.variant == 2 ? data.class_count : 1;
    v.quantum_front = c.server_front == "quantum";
    v.circuit_id = c.circuit_id;
    v.seed = c.seed;
    v.eval_mode = c.eval_mode == "shots"
                      ? qsim::EvalMode::with_shots(c.shots, rng::derive(c.seed, 0x5807))
                      : qsim::EvalMode::analytic();
    return v;
}

splitproto::TrainPlan train_plan(const RunConfig& c, const dataio::Dataset& data) {
    splitproto::TrainPlan plan;
    plan.clients = c.clients;
    plan.global_epochs = c.epochs;
    plan.lr = c.lr;
    plan.batch_size = static_cast<std::size_t>(c.batch_size);
    plan.seed = c.seed;
    plan.variant = variant_config(c, data);
    return plan;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<splitproto::EpochMetric>& metrics) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write metrics csv: " + path);
    os << "epoch,client,test_loss_nats,test_accuracy_ratio,test_f1_ratio\n";
    for (const auto& m : metrics) {
        os << m.epoch << "," << m.client << "," << m.loss << "," << m.accuracy << ","
           << m.f1 << "\n";
    }
}

void save_model(const std::string& path, models::SplitModel& model) {
    neural::save_checkpoint(path, model.state());
    log_info("checkpoint written to " + path);
}

models::SplitModel load_model(const RunConfig& c, const dataio::Dataset& data,
                              const std::string& checkpoint) {
    auto model = models::build_variant(variant_config(c, data));
    model.load_state(neural::load_checkpoint(checkpoint));
    return model;
}

// ------------------------------------------------------------------ commands

int cmd_train(const RunConfig& c, const std::string& metrics_path,
              const std::string& checkpoint_path) {
    const auto data = build_dataset(c);
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);
    const auto plan = train_plan(c, train);
    const auto shards =
        splitproto::shard_iid(train, static_cast<std::size_t>(c.clients),
                              rng::derive(c.seed, 0x54a2d));
    log_info("training variant " + std::to_string(c.variant) + " (" + c.server_front +
             " front) on " + std::to_string(train.size()) + " samples, " +
             std::to_string(c.clients) + " client(s)");
    auto result = splitproto::train_multi(plan, shards, &test, nullptr);
    if (!metrics_path.empty()) write_metrics_csv(metrics_path, result.metrics);
    if (!checkpoint_path.empty()) save_model(checkpoint_path, result.model);
    const auto& last = result.metrics.back();
    std::cout << "final test accuracy " << last.accuracy << ", f1 " << last.f1 << "\n";
    return kExitOk;
}

int cmd_eval(const RunConfig& c, const std::string& checkpoint, const std::string& out) {
    const auto data = build_dataset(c);
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);
    auto model = load_model(c, train, checkpoint);

    std::optional<splitproto::NoisyChannelConfig> noise;
    if (c.noise_p1 > 0.0 || c.noise_p2 > 0.0) {
        noise = splitproto::NoisyChannelConfig{c.noise_p1, c.noise_p2, 16,
                                               rng::derive(c.seed, 0x4015e)};
    }
    const auto metrics = splitproto::evaluate_model(model, test, c.defense, noise);
    if (!out.empty()) {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write report: " + out);
        os << "test_loss_nats,test_accuracy_ratio,test_f1_ratio,noise_p1,noise_p2,"
              "defense_mu_rad,defense_b\n";
        os << metrics.loss << "," << metrics.accuracy << "," << metrics.f1 << ","
           << c.noise_p1 << "," << c.noise_p2 << ","
           << (c.defense ? c.defense->mu : 0.0) << ","
           << (c.defense ? c.defense->b : 0.0) << "\n";
    }
    std::cout << "accuracy " << metrics.accuracy << ", f1 " << metrics.f1 << ", loss "
              << metrics.loss << "\n";
    return kExitOk;
}

int cmd_sweep_circuits(const RunConfig& c, const std::string& out) {
    const auto data = build_dataset(c);
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);

    std::ofstream os(out, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write report: " + out);
    os << "front,circuit_id,trainable_params,circuit_depth,test_accuracy_ratio,"
          "test_f1_ratio\n";

    auto run_one = [&](bool quantum, int circuit_id) {
        RunConfig local = c;
        local.server_front = quantum ? "quantum" : "classical";
        local.circuit_id = quantum ? circuit_id : c.circuit_id;
        auto plan = train_plan(local, train);
        const auto shards = splitproto::shard_iid(
            train, static_cast<std::size_t>(c.clients), rng::derive(c.seed, 0x54a2d));
        auto result = splitproto::train_multi(plan, shards, &test, nullptr);
        const auto& last = result.metrics.back();
        if (quantum) {
            const auto spec = qlayer::build_catalog_circuit(circuit_id);
            log_debug("circuit " + std::to_string(circuit_id) + " diagram:\n" +
                      qlayer::to_diagram(spec));
            os << "quantum," << circuit_id << "," << spec.num_params << ","
               << qlayer::depth(spec) << "," << last.accuracy << "," << last.f1 << "\n";
        } else {
            os << "classical,," << 3 * 2 + 2 << ",," << last.accuracy << "," << last.f1
               << "\n";
        }
        log_info((quantum ? "circuit " + std::to_string(circuit_id) : std::string("classical")) +
                 ": accuracy " + std::to_string(last.accuracy));
    };

    for (int id = 1; id <= 10; ++id) run_one(true, id);
    run_one(false, 0);
    std::cout << "sweep written to " << out << "\n";
    return kExitOk;
}

int cmd_attack(const RunConfig& c, const std::string& checkpoint, const std::string& out) {
    const auto data = build_dataset(c);
    if (!data.is_image()) throw ConfigError("the attack harness needs an image dataset");
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);
    auto model = load_model(c, train, checkpoint);

    const auto [x_rec, x_inf] = attack::split_attack_pools(test, rng::derive(c.seed, 0xa7));
    log_info("attack pools: " + std::to_string(x_rec.size()) + " training images, " +
             std::to_string(x_inf.size()) + " targets");
    const auto pairs = attack::generate_shadow_pairs(model, x_rec);
    auto rec_model = attack::build_attack_model(c.attack_model_id, rng::derive(c.seed, 0xdec0));
    const auto trace = attack::train_attack(
        rec_model, pairs,
        {c.attack_epochs, static_cast<std::size_t>(c.batch_size), rng::derive(c.seed, 0x7a1)});
    log_info("attack loss " + std::to_string(trace.front()) + " -> " +
             std::to_string(trace.back()));

    std::ofstream os(out, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write report: " + out);
    os << "attack_model,mu_over_pi,b,metric,value,baseline\n";
    const auto no_defense = attack::evaluate_attack(rec_model, x_inf, model, std::nullopt);
    auto emit = [&](const std::string& mu, const std::string& b, const char* name,
                    double value, double baseline) {
        os << c.attack_model_id << "," << mu << "," << b << "," << name << "," << value
           << "," << baseline << "\n";
    };
    auto emit_report = [&](const std::string& mu, const std::string& b,
                           const attack::MetricReport& r, const attack::MetricReport& base) {
        emit(mu, b, "cosine_distance", r.cosine_distance, base.cosine_distance);
        emit(mu, b, "mse", r.mse, base.mse);
        emit(mu, b, "dssim", r.dssim, base.dssim);
        emit(mu, b, "lsd", r.lsd, base.lsd);
    };
    emit_report("none", "none", no_defense.baseline, no_defense.baseline);
    std::uint64_t stream = 0;
    for (const auto& [mu, b] : defense::sweep_grid()) {
        defense::LaplaceNoiseConfig cfg{mu, b, rng::derive(c.seed, 0x61d ^ stream)};
        ++stream;
        const auto eval = attack::evaluate_attack(rec_model, x_inf, model, cfg);
        char mu_buf[32];
        std::snprintf(mu_buf, sizeof(mu_buf), "%g", mu / kPi);
        char b_buf[32];
        std::snprintf(b_buf, sizeof(b_buf), "%g", b);
        emit_report(mu_buf, b_buf, eval.report, eval.baseline);
    }
    std::cout << "attack report written to " << out << "\n";
    return kExitOk;
}

int cmd_serve(const RunConfig& c, const std::string& checkpoint_path) {
    if (c.transport.kind != "tcp") throw ConfigError("serve requires transport.kind = tcp");
    const auto data = build_dataset(c);
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);
    auto model = models::build_variant(variant_config(c, train));

    splitproto::TcpListener listener(c.transport.host, c.transport.port);
    std::cout << "listening on " << c.transport.host << ":" << listener.port() << "\n";
    auto channel = listener.accept();
    log_info("client connected");
    splitproto::ServerSession session(model, c.lr);
    splitproto::serve_until_done(*channel, session);
    log_info("session complete");
    if (!checkpoint_path.empty()) save_model(checkpoint_path, model);
    return kExitOk;
}

int cmd_client(const RunConfig& c, const std::string& metrics_path) {
    if (c.transport.kind != "tcp") throw ConfigError("client requires transport.kind = tcp");
    const auto data = build_dataset(c);
    const auto folds = dataio::stratified_kfold(data, static_cast<std::size_t>(c.folds),
                                                rng::derive(c.seed, 0xf01d));
    const auto [train, test] = dataio::split_by_fold(data, folds, 0);
    const auto plan = train_plan(c, train);
    auto model = models::build_variant(plan.variant);

    auto channel = splitproto::tcp_connect(c.transport.host, c.transport.port);
    std::vector<dataio::Dataset> shards;
    shards.push_back(train);
    const auto metrics =
        splitproto::run_client_over_channel(plan, *channel, model, shards, &test);
    if (!metrics_path.empty()) write_metrics_csv(metrics_path, metrics);
    const auto& last = metrics.back();
    std::cout << "final test accuracy " << last.accuracy << ", f1 " << last.f1 << "\n";
    return kExitOk;
}

int cmd_circuit(int id) {
    const auto spec = qlayer::build_catalog_circuit(id);
    std::cout << qlayer::to_diagram(spec);
    std::cout << "qubits " << spec.num_qubits << ", inputs " << spec.num_inputs
              << ", trainable params " << spec.num_params << ", depth "
              << qlayer::depth(spec) << "\n";
    return kExitOk;
}

const char* kConfigHelp = R"(JSON run-config keys and defaults:
  variant        1                 model variant: 1 (binary, 7 features) or 2 (images)
  server_front   "quantum"         "quantum" or "classical"
  circuit_id     6                 catalog circuit for the quantum front (1..10)
  dataset        blobs spec        {"kind":"blobs","n":1000,"features":7,"classes":2,
                                    "separation":4.0} | {"kind":"moons","n":...,"noise":0.1}
                                   | {"kind":"shapes","n":...,"classes":2..4}
                                   | {"kind":"csv","path":...,"label_column":last,
                                      "feature_columns":[all but label]}
                                   | {"kind":"idx","images":...,"labels":...}
                                   | "file.csv" (string shorthand)
  folds          5                 stratified folds; fold 0 is held out
  epochs         20                global training epochs
  lr             0.001             learning rate (Adam, both halves)
  batch_size     32                mini-batch size
  seed           42                master seed; every stream derives from it
  clients        1                 round-robin clients (in-process only for K > 1)
  transport      in-process        {"kind":"in-process"} or
                                   {"kind":"tcp","host":"127.0.0.1","port":9000}
  eval_mode      "analytic"        "analytic" or "shots"
  shots          1000              shots per expectation when eval_mode = "shots"
  noise          {p1:0,p2:0}       depolarizing probabilities for eval-time circuits
  defense        null              {"mu_over_pi":4.0,"b":0.01,"seed":7}; null disables
  attack         {model_id:3,      reconstruction model (1..3) and its training epochs
                  epochs:60}
Unknown keys are rejected.)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("hqsl - hybrid quantum split learning workbench\n\n") +
                 kConfigHelp};
    app.require_subcommand(1);

    std::string config_path, metrics_path, checkpoint_path, report_path;
    int circuit_id = 6;

    auto* train = app.add_subcommand("train", "train a split model per the run config");
    train->add_option("--config", config_path, "run-config JSON")->required();
    train->add_option("--metrics", metrics_path, "per-epoch metrics CSV");
    train->add_option("--checkpoint", checkpoint_path, "weight checkpoint output");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the held-out fold");
    eval->add_option("--config", config_path, "run-config JSON")->required();
    eval->add_option("--checkpoint", checkpoint_path, "weight checkpoint")->required();
    eval->add_option("--out", report_path, "report CSV");

    auto* sweep = app.add_subcommand(
        "sweep-circuits", "train every catalog circuit plus the classical front");
    sweep->add_option("--config", config_path, "run-config JSON")->required();
    sweep->add_option("--out", report_path, "comparison CSV")->required();

    auto* atk = app.add_subcommand(
        "attack", "shadow-model reconstruction attack across the defense grid");
    atk->add_option("--config", config_path, "run-config JSON")->required();
    atk->add_option("--checkpoint", checkpoint_path, "trained model checkpoint")->required();
    atk->add_option("--out", report_path, "attack metric CSV")->required();

    auto* serve = app.add_subcommand("serve", "server role over tcp (one client session)");
    serve->add_option("--config", config_path, "run-config JSON")->required();
    serve->add_option("--checkpoint", checkpoint_path, "checkpoint written after Done");

    auto* client = app.add_subcommand("client", "client role over tcp");
    client->add_option("--config", config_path, "run-config JSON")->required();
    client->add_option("--metrics", metrics_path, "per-epoch metrics CSV");

    auto* circuit = app.add_subcommand("circuit", "print a catalog circuit diagram");
    circuit->add_option("--id", circuit_id, "catalog circuit id (1..10)")
        ->default_val(6);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (circuit->parsed()) return cmd_circuit(circuit_id);
        const RunConfig cfg = load_config(config_path);
        if (train->parsed()) return cmd_train(cfg, metrics_path, checkpoint_path);
        if (eval->parsed()) return cmd_eval(cfg, checkpoint_path, report_path);
        if (sweep->parsed()) return cmd_sweep_circuits(cfg, report_path);
        if (atk->parsed()) return cmd_attack(cfg, checkpoint_path, report_path);
        if (serve->parsed()) return cmd_serve(cfg, checkpoint_path);
        if (client->parsed()) return cmd_client(cfg, metrics_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
