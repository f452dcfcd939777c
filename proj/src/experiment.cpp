#include "relbias/experiment.hpp"

#include "relbias/error.hpp"
#include "relbias/parallel.hpp"
#include "relbias/stats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace relbias::exp {

namespace {

const std::vector<FusionMode> kAllFusion{FusionMode::plain, FusionMode::early, FusionMode::mid};

/// One comparison per fusion mode between two pooled value groups.
std::vector<ComparisonSpec> per_fusion(const std::string& prefix, const std::vector<std::string>& a,
                                       const std::vector<std::string>& b,
                                       const std::vector<FusionMode>& modes = kAllFusion) {
    std::vector<ComparisonSpec> out;
    for (auto f : modes) {
        ComparisonSpec c;
        c.id = prefix + "/" + std::string(to_string(f));
        for (const auto& v : a) c.group_a.push_back({v, f});
        for (const auto& v : b) c.group_b.push_back({v, f});
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<ExperimentSpec> build_catalog() {
    std::vector<ExperimentSpec> cat;

    ExperimentSpec base;
    base.model.hidden_sizes = {10};
    base.model.activation = nn::ActivationKind::relu;
    base.model.representation = data::Representation::zero_one;

    {
        auto e = base;
        e.id = "dim-sweep";
        e.description = "Equality accuracy for vector dimensions 2..100, 75:25 split";
        e.sweep = SweepKind::dimension;
        e.values = {"2", "3", "5", "10", "20", "30", "40", "50", "60", "70", "80", "90", "100"};
        e.comparisons = per_fusion("dim-2,3-vs-90,100", {"2", "3"}, {"90", "100"});
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "trainsize-sweep";
        e.description = "Training size: n=10, test fixed at 50% of the data, nested training sets of 1%..50%";
        e.sweep = SweepKind::train_fraction;
        e.model.vector_dim = 10;
        e.values = {"0.01", "0.02", "0.05", "0.10", "0.20", "0.30", "0.40", "0.50"};
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "split-sweep";
        e.description = "Split ratio: n=10, train/test splits from 75/25 to 95/5";
        e.sweep = SweepKind::split_ratio;
        e.model.vector_dim = 10;
        e.values = {"0.75", "0.80", "0.85", "0.90", "0.95"};
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "coverage";
        e.description = "Coverage: n=10, test vectors appear in training unequal pairs in one or both positions";
        e.sweep = SweepKind::coverage;
        e.model.vector_dim = 10;
        e.values = {"one_position", "both_positions"};
        e.comparisons = per_fusion("coverage-one-vs-both", {"one_position"}, {"both_positions"});
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "depth-sweep";
        e.description = "Depth: n=3, 1..5 hidden layers of 10 units";
        e.sweep = SweepKind::depth;
        e.model.vector_dim = 3;
        e.values = {"1", "2", "3", "4", "5"};
        e.comparisons = per_fusion("depth-1,2-vs-4,5", {"1", "2"}, {"4", "5"});
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "width-sweep";
        e.description = "Width: n=3, one hidden layer of 10..100 units";
        e.sweep = SweepKind::width;
        e.model.vector_dim = 3;
        e.values = {"10", "20", "30", "40", "50", "80", "100"};
        e.comparisons = per_fusion("width-10,20-vs-80,100", {"10", "20"}, {"80", "100"});
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "activation-sweep";
        e.description = "Activation: n=3, relu / sigmoid / tanh hidden activation";
        e.sweep = SweepKind::activation;
        e.model.vector_dim = 3;
        e.values = {"relu", "sigmoid", "tanh"};
        e.comparisons = per_fusion("activation-relu-vs-sigmoid", {"relu"}, {"sigmoid"});
        auto tanh = per_fusion("activation-relu-vs-tanh", {"relu"}, {"tanh"});
        e.comparisons.insert(e.comparisons.end(), tanh.begin(), tanh.end());
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "representation";
        e.description = "Representation: n=3, 0/1 versus -1/1 input encoding";
        e.sweep = SweepKind::representation;
        e.model.vector_dim = 3;
        e.values = {"zero_one", "sign"};
        e.comparisons = per_fusion("representation-0/1-vs-sign", {"zero_one"}, {"sign"});
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "combined-factors";
        e.description = "Combined factors: n=3 plain network with 5 hidden layers, sigmoid and -1/1 encoding";
        e.sweep = SweepKind::depth;
        e.model.vector_dim = 3;
        e.model.activation = nn::ActivationKind::sigmoid;
        e.model.representation = data::Representation::sign;
        e.values = {"5"};
        e.fusion_modes = {FusionMode::plain};
        cat.push_back(std::move(e));
    }
    {
        auto e = base;
        e.id = "tasks";
        e.description = "Other tasks: n=10 comparison, digit sum >= 3, reversal and parity";
        e.sweep = SweepKind::task;
        e.model.vector_dim = 10;
        e.values = {"comparison", "digitsum3", "reversal", "parity"};
        for (const auto& t : e.values) {
            e.comparisons.push_back({"tasks-" + t + "/plain-vs-early", {{t, FusionMode::plain}}, {{t, FusionMode::early}}});
            e.comparisons.push_back({"tasks-" + t + "/early-vs-mid", {{t, FusionMode::early}}, {{t, FusionMode::mid}}});
        }
        cat.push_back(std::move(e));
    }
    return cat;
}

int parse_int(std::string_view text, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
    }
    return v;
}

double parse_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(what) + ": not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

train::TrainTestSplit equality_split(int n, double fraction, std::uint64_t seed) {
    auto full = data::gen_equality_dataset(n, seed);
    auto [tr, te] = data::stratified_split(full, fraction, seed);
    return {std::move(tr), std::move(te)};
}

} // namespace

std::string_view to_string(SweepKind kind) {
    switch (kind) {
    case SweepKind::dimension: return "dimension";
    case SweepKind::train_fraction: return "train_fraction";
    case SweepKind::split_ratio: return "split_ratio";
    case SweepKind::coverage: return "coverage";
    case SweepKind::depth: return "depth";
    case SweepKind::width: return "width";
    case SweepKind::activation: return "activation";
    case SweepKind::representation: return "representation";
    case SweepKind::task: return "task";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (id.empty()) throw ConfigError("experiment id must not be empty");
    if (values.empty()) throw ConfigError(id + ": sweep has no values");
    if (fusion_modes.empty()) throw ConfigError(id + ": no fusion modes");
    if (simulations < 1) throw ConfigError(id + ": simulations must be >= 1");
    train.validate();
    for (const auto& v : values) {
        for (auto f : fusion_modes) make_cell(*this, v, f).model.validate();
    }
}

const std::vector<ExperimentSpec>& catalog() {
    static const std::vector<ExperimentSpec> cat = build_catalog();
    return cat;
}

const ExperimentSpec& find_experiment(std::string_view id) {
    std::string known;
    for (const auto& e : catalog()) {
        if (e.id == id) return e;
        known += (known.empty() ? "" : ", ") + e.id;
    }
    throw UsageError("unknown experiment '" + std::string(id) + "'; valid ids: " + known);
}

void RunOptions::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "seed") {
        seed = parse_u64(value, key);
    } else if (key == "sims" || key == "simulations") {
        const int v = parse_int(value, key);
        if (v < 1) throw ConfigError("sims must be >= 1");
        simulations = v;
    } else if (key == "threads") {
        const int v = parse_int(value, key);
        if (v < 1) throw ConfigError("threads must be >= 1");
        threads = v;
    } else if (key == "epochs") {
        const int v = parse_int(value, key);
        if (v < 1) throw ConfigError("epochs must be >= 1");
        epochs = v;
    } else if (key == "learning_rate" || key == "lr") {
        const double v = parse_double(value, key);
        if (v < 0.0) throw ConfigError("learning_rate must be >= 0");
        learning_rate = v;
    } else if (key == "batch_size") {
        const int v = parse_int(value, key);
        if (v < 1) throw ConfigError("batch_size must be >= 1");
        batch_size = v;
    } else {
        throw ConfigError("unknown option '" + std::string(key) +
                          "' (expected seed, sims, threads, epochs, learning_rate, batch_size)");
    }
}

void RunOptions::load(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        set(s.substr(0, eq), s.substr(eq + 1));
    }
}

void RunOptions::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    load(in);
}

ExperimentSpec RunOptions::apply(ExperimentSpec spec) const {
    if (seed) spec.base_seed = *seed;
    if (simulations) spec.simulations = *simulations;
    if (epochs) spec.train.epochs = *epochs;
    if (learning_rate) spec.train.learning_rate = *learning_rate;
    if (batch_size) spec.train.batch_size = *batch_size;
    return spec;
}

CellSetup make_cell(const ExperimentSpec& spec, const std::string& value, FusionMode fusion) {
    CellSetup cell;
    cell.model = spec.model;
    cell.model.fusion = fusion;
    auto task = spec.task;
    double fraction = spec.split_fraction;
    const std::size_t task_size = spec.task_size;

    switch (spec.sweep) {
    case SweepKind::dimension: cell.model.vector_dim = parse_int(value, "dimension"); break;
    case SweepKind::depth:
        cell.model.hidden_sizes.assign(static_cast<std::size_t>(parse_int(value, "depth")), spec.model.hidden_sizes.at(0));
        break;
    case SweepKind::width: cell.model.hidden_sizes = {parse_int(value, "width")}; break;
    case SweepKind::activation: cell.model.activation = nn::parse_activation(value); break;
    case SweepKind::representation: cell.model.representation = data::parse_representation(value); break;
    case SweepKind::task: task = data::parse_task(value); break;
    case SweepKind::split_ratio: fraction = parse_double(value, "split_ratio"); break;
    case SweepKind::train_fraction: {
        const double share = parse_double(value, "train_fraction");
        if (!(share > 0.0 && share <= 0.5)) throw ConfigError("train_fraction must lie in (0, 0.5]");
        const int n = cell.model.vector_dim;
        cell.generator = [n, share](std::uint64_t seed) {
            auto full = data::gen_equality_dataset(n, seed);
            auto [pool, test] = data::stratified_split(full, 0.5, seed);
            const auto per_class = static_cast<std::size_t>(std::llround(share * static_cast<double>(full.size()) / 2.0));
            return train::TrainTestSplit{data::stratified_take(pool, per_class, seed), std::move(test)};
        };
        return cell;
    }
    case SweepKind::coverage: {
        const auto mode = data::parse_coverage(value);
        const int n = cell.model.vector_dim;
        if (mode == data::CoverageMode::random) {
            cell.generator = [n, fraction](std::uint64_t seed) { return equality_split(n, fraction, seed); };
        } else {
            cell.generator = [n, mode](std::uint64_t seed) {
                auto [tr, te] = data::gen_coverage_dataset(n, mode, seed);
                return train::TrainTestSplit{std::move(tr), std::move(te)};
            };
        }
        return cell;
    }
    }

    const int n = cell.model.vector_dim;
    if (task == data::TaskKind::equality) {
        cell.generator = [n, fraction](std::uint64_t seed) { return equality_split(n, fraction, seed); };
    } else {
        cell.generator = [n, fraction, task, task_size](std::uint64_t seed) {
            auto full = data::gen_task_dataset(task, n, task_size, seed);
            auto [tr, te] = data::stratified_split(full, fraction, seed);
            return train::TrainTestSplit{std::move(tr), std::move(te)};
        };
    }
    return cell;
}

bool ReportRow::same_serialized(const ReportRow& o) const {
    if (experiment != o.experiment || sweep_value != o.sweep_value || fusion != o.fusion || failed != o.failed) {
        return false;
    }
    return failed || (mean == o.mean && sd == o.sd && accuracies == o.accuracies);
}

const ReportRow* ExperimentReport::find(const std::string& value, FusionMode fusion) const {
    for (const auto& r : rows) {
        if (r.sweep_value == value && r.fusion == fusion) return &r;
    }
    return nullptr;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, int threads) {
    spec.validate();
    ExperimentReport report;
    report.spec = spec;
    for (const auto& v : spec.values) {
        for (auto f : spec.fusion_modes) {
            ReportRow row;
            row.experiment = spec.id;
            row.sweep_value = v;
            row.fusion = f;
            report.rows.push_back(std::move(row));
        }
    }

    parallel_for(report.rows.size(), threads, [&](std::size_t i) {
        auto& row = report.rows[i];
        try {
            auto cell = make_cell(spec, row.sweep_value, row.fusion);
            nn::TrainConfig config = spec.train;
            config.seed = spec.base_seed;
            auto summary = train::run_simulations(cell.model, cell.generator, config, spec.simulations);
            row.accuracies = std::move(summary.accuracies);
            row.train_accuracies = std::move(summary.train_accuracies);
            row.mean = summary.mean;
            row.sd = summary.sd;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    });

    for (const auto& c : spec.comparisons) {
        ComparisonResult result;
        result.id = c.id;
        try {
            auto gather = [&](const std::vector<CellRef>& refs) {
                std::vector<std::vector<double>> lists;
                for (const auto& ref : refs) {
                    const auto* row = report.find(ref.value, ref.fusion);
                    if (row == nullptr) throw ConfigError("comparison " + c.id + " refers to a missing cell");
                    if (row->failed) throw ConfigError("comparison " + c.id + " includes a failed cell");
                    lists.push_back(row->accuracies);
                }
                return lists;
            };
            const auto a = gather(c.group_a);
            const auto b = gather(c.group_b);
            const auto cmp = stats::compare_pooled(a, b);
            result.w_statistic = cmp.w_statistic;
            result.p_value = cmp.p_value;
            result.significant = cmp.significant;
            result.pooled_size = cmp.pooled_size;
        } catch (const std::exception& e) {
            result.error = e.what();
        }
        report.comparisons.push_back(std::move(result));
    }
    return report;
}

} // namespace relbias::exp
