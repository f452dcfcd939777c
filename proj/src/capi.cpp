#include "relbias/relbias.h"

#include "relbias/datagen.hpp"
#include "relbias/error.hpp"
#include "relbias/experiment.hpp"
#include "relbias/fusion.hpp"
#include "relbias/stats.hpp"
#include "relbias/trainer.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

using namespace relbias;

struct rb_run_options {
    exp::RunOptions options;
};

struct rb_report {
    exp::ExperimentReport report;
    std::vector<std::string> fusion_names;
};

struct rb_dataset {
    data::Dataset dataset;
};

struct rb_model {
    MLPModel model;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
rb_status guarded(Fn&& fn) {
    g_last_error.clear();
    try {
        fn();
        return RB_OK;
    } catch (const UsageError& e) {
        g_last_error = e.what();
        return RB_ERR_USAGE;
    } catch (const ConfigError& e) {
        g_last_error = e.what();
        return RB_ERR_CONFIG;
    } catch (const IoError& e) {
        g_last_error = e.what();
        return RB_ERR_IO;
    } catch (const TrainingDiverged& e) {
        g_last_error = e.what();
        return RB_ERR_DIVERGED;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RB_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw UsageError(std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
    auto* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ModelSpec to_spec(const rb_model_spec* in) {
    require(in, "spec");
    ModelSpec spec;
    spec.vector_dim = in->vector_dim;
    if (in->hidden_count > 0) {
        require(in->hidden_sizes, "spec->hidden_sizes");
        spec.hidden_sizes.assign(in->hidden_sizes, in->hidden_sizes + in->hidden_count);
    }
    if (in->activation != nullptr) spec.activation = nn::parse_activation(in->activation);
    if (in->fusion != nullptr) spec.fusion = parse_fusion(in->fusion);
    if (in->representation != nullptr) spec.representation = data::parse_representation(in->representation);
    spec.validate();
    return spec;
}

std::vector<double> pooled_accuracies(const char* path, const char* fusion) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open results CSV ") + path);
    std::vector<double> pooled;
    for (const auto& row : exp::parse_rows_csv(in)) {
        if (fusion != nullptr && to_string(row.fusion) != fusion) continue;
        if (row.failed) throw ConfigError(std::string(path) + ": row " + row.sweep_value + " failed");
        pooled.insert(pooled.end(), row.accuracies.begin(), row.accuracies.end());
    }
    return pooled;
}

rb_wilcoxon_result to_c(const stats::WilcoxonResult& w, double alpha) {
    rb_wilcoxon_result out{};
    out.w_statistic = w.w_statistic;
    out.p_value = w.p_value;
    out.n_effective = w.n_effective;
    out.exact = w.method == stats::WilcoxonMethod::exact ? 1 : 0;
    out.significant = w.p_value < alpha ? 1 : 0;
    return out;
}

} // namespace

extern "C" {

const char* rb_last_error(void) { return g_last_error.c_str(); }

const char* rb_version(void) { return "1.0.0"; }

void rb_string_free(char* text) { delete[] text; }

rb_status rb_run_options_create(rb_run_options** out) {
    return guarded([&] {
        require(out, "out");
        *out = new rb_run_options{};
    });
}

void rb_run_options_free(rb_run_options* options) { delete options; }

rb_status rb_run_options_set(rb_run_options* options, const char* key, const char* value) {
    return guarded([&] {
        require(options, "options");
        require(key, "key");
        require(value, "value");
        options->options.set(key, value);
    });
}

rb_status rb_run_options_load_config(rb_run_options* options, const char* path) {
    return guarded([&] {
        require(options, "options");
        require(path, "path");
        options->options.load_file(path);
    });
}

size_t rb_catalog_size(void) { return exp::catalog().size(); }

const char* rb_catalog_id(size_t index) {
    const auto& cat = exp::catalog();
    return index < cat.size() ? cat[index].id.c_str() : nullptr;
}

const char* rb_catalog_description(size_t index) {
    const auto& cat = exp::catalog();
    return index < cat.size() ? cat[index].description.c_str() : nullptr;
}

rb_status rb_experiment_run(const char* id, const rb_run_options* options, rb_report** out) {
    return guarded([&] {
        require(id, "id");
        require(out, "out");
        *out = nullptr;
        exp::RunOptions defaults;
        const auto& opts = options != nullptr ? options->options : defaults;
        const auto spec = opts.apply(exp::find_experiment(id));
        auto handle = std::make_unique<rb_report>();
        handle->report = exp::run_experiment(spec, opts.threads);
        for (const auto& row : handle->report.rows) {
            handle->fusion_names.emplace_back(to_string(row.fusion));
        }
        *out = handle.release();
    });
}

void rb_report_free(rb_report* report) { delete report; }

const char* rb_report_id(const rb_report* report) {
    return report != nullptr ? report->report.spec.id.c_str() : nullptr;
}

size_t rb_report_row_count(const rb_report* report) { return report != nullptr ? report->report.rows.size() : 0; }

rb_status rb_report_row(const rb_report* report, size_t index, rb_row_info* out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        if (index >= report->report.rows.size()) throw UsageError("row index out of range");
        const auto& row = report->report.rows[index];
        out->sweep_value = row.sweep_value.c_str();
        out->fusion = report->fusion_names[index].c_str();
        out->mean_accuracy = row.mean;
        out->sd_pp = row.sd;
        out->simulations = row.accuracies.size();
        out->failed = row.failed ? 1 : 0;
        out->error = row.error.c_str();
    });
}

rb_status rb_report_row_accuracies(const rb_report* report, size_t index, double* test_accuracies,
                                   double* train_accuracies, size_t capacity, size_t* count) {
    return guarded([&] {
        require(report, "report");
        if (index >= report->report.rows.size()) throw UsageError("row index out of range");
        const auto& row = report->report.rows[index];
        if (count != nullptr) *count = row.accuracies.size();
        for (size_t i = 0; i < row.accuracies.size() && i < capacity; ++i) {
            if (test_accuracies != nullptr) test_accuracies[i] = row.accuracies[i];
            if (train_accuracies != nullptr) train_accuracies[i] = row.train_accuracies[i];
        }
    });
}

rb_status rb_report_emit(const rb_report* report, const char* format, char** out_text) {
    return guarded([&] {
        require(report, "report");
        require(format, "format");
        require(out_text, "out_text");
        *out_text = copy_string(exp::emit_report(report->report, exp::parse_format(format)));
    });
}

rb_status rb_dataset_generate(const char* task, int n, size_t size, uint64_t seed, rb_dataset** out) {
    return guarded([&] {
        require(task, "task");
        require(out, "out");
        *out = nullptr;
        const auto kind = data::parse_task(task);
        auto handle = std::make_unique<rb_dataset>();
        if (kind == data::TaskKind::equality && size == 0) {
            handle->dataset = data::gen_equality_dataset(n, seed);
        } else {
            handle->dataset = data::gen_task_dataset(kind, n, size, seed);
        }
        *out = handle.release();
    });
}

void rb_dataset_free(rb_dataset* dataset) { delete dataset; }

size_t rb_dataset_size(const rb_dataset* dataset) { return dataset != nullptr ? dataset->dataset.size() : 0; }

int rb_dataset_dim(const rb_dataset* dataset) { return dataset != nullptr ? dataset->dataset.n : 0; }

size_t rb_dataset_positives(const rb_dataset* dataset) {
    return dataset != nullptr ? dataset->dataset.positives() : 0;
}

rb_status rb_dataset_write_csv(const rb_dataset* dataset, const char* path) {
    return guarded([&] {
        require(dataset, "dataset");
        require(path, "path");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError(std::string("cannot write ") + path);
        data::write_csv(out, dataset->dataset);
        if (!out) throw IoError(std::string("write failed: ") + path);
    });
}

rb_status rb_dataset_emit_csv(const rb_dataset* dataset, char** out_text) {
    return guarded([&] {
        require(dataset, "dataset");
        require(out_text, "out_text");
        std::ostringstream os;
        data::write_csv(os, dataset->dataset);
        *out_text = copy_string(os.str());
    });
}

rb_status rb_wilcoxon(const double* a, const double* b, size_t length, double alpha, rb_wilcoxon_result* out) {
    return guarded([&] {
        require(out, "out");
        if (length > 0) {
            require(a, "a");
            require(b, "b");
        }
        const auto w = stats::wilcoxon_signed_rank(std::span(a, length), std::span(b, length));
        *out = to_c(w, alpha);
    });
}

rb_status rb_stats_compare_csv(const char* csv_a, const char* csv_b, const char* fusion, double alpha,
                               rb_wilcoxon_result* out) {
    return guarded([&] {
        require(csv_a, "csv_a");
        require(csv_b, "csv_b");
        require(out, "out");
        if (fusion != nullptr) parse_fusion(fusion);
        const auto a = pooled_accuracies(csv_a, fusion);
        const auto b = pooled_accuracies(csv_b, fusion);
        if (a.size() != b.size()) {
            throw ConfigError("pooled accuracy lists differ in length (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
        }
        *out = to_c(stats::wilcoxon_signed_rank(a, b), alpha);
    });
}

rb_status rb_model_build(const rb_model_spec* spec, uint64_t seed, rb_model** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        *out = new rb_model{build_model(to_spec(spec), seed)};
    });
}

void rb_model_free(rb_model* model) { delete model; }

size_t rb_model_parameter_count(const rb_model* model) {
    return model != nullptr ? model->model.spec().trainable_parameter_count() : 0;
}

rb_status rb_model_forward_pair(const rb_model* model, const char* v1_bits, const char* v2_bits,
                                double* probability) {
    return guarded([&] {
        require(model, "model");
        require(v1_bits, "v1_bits");
        require(v2_bits, "v2_bits");
        require(probability, "probability");
        const data::VectorPair pair{data::parse_bits(v1_bits), data::parse_bits(v2_bits)};
        *probability = model->model.forward_pair(pair);
    });
}

rb_status rb_model_train(const rb_model_spec* spec, const rb_dataset* train_data, const rb_run_options* options,
                         rb_model** out, double* train_accuracy) {
    return guarded([&] {
        require(train_data, "train_data");
        require(out, "out");
        *out = nullptr;
        nn::TrainConfig config;
        if (options != nullptr) {
            const auto& o = options->options;
            if (o.epochs) config.epochs = *o.epochs;
            if (o.learning_rate) config.learning_rate = *o.learning_rate;
            if (o.batch_size) config.batch_size = *o.batch_size;
            if (o.seed) config.seed = *o.seed;
        }
        auto [model, result] = train::train(to_spec(spec), train_data->dataset, config);
        if (train_accuracy != nullptr) *train_accuracy = result.train_accuracy;
        *out = new rb_model{std::move(model)};
    });
}

rb_status rb_model_evaluate(const rb_model* model, const rb_dataset* data, double* accuracy) {
    return guarded([&] {
        require(model, "model");
        require(data, "data");
        require(accuracy, "accuracy");
        *accuracy = train::evaluate(model->model, data->dataset);
    });
}

rb_status rb_dr_compute(const double* v1, const double* v2, size_t n, double* out) {
    return guarded([&] {
        if (n > 0) {
            require(v1, "v1");
            require(v2, "v2");
            require(out, "out");
        }
        const auto dr = dr_compute(std::span(v1, n), std::span(v2, n));
        std::copy(dr.begin(), dr.end(), out);
    });
}

} // extern "C"
