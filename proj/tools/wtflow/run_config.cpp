// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <concepts>
#include <fstream>
#include <set>

#include "wtflow/error.hpp"

namespace wtflow::cli {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw FormatError("config: " + where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw FormatError("config: unknown key '" + key + "' in " + where);
    }
}

void take(const json& obj, const char* key, double& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) throw FormatError("config: " + where + "." + key + " must be a number");
    dst = v.get<double>();
}

template <std::unsigned_integral U>
void take(const json& obj, const char* key, U& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) throw FormatError("config: " + where + "." + key + " must be a non-negative integer");
    dst = v.get<U>();
}

void take(const json& obj, const char* key, bool& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw FormatError("config: " + where + "." + key + " must be true or false");
    dst = v.get<bool>();
}

void take(const json& obj, const char* key, std::string& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) throw FormatError("config: " + where + "." + key + " must be a string");
    dst = v.get<std::string>();
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

} // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, {"preset", "seed", "data", "out_dir", "log_every", "train", "path", "wt", "model"}, "config");
    RunConfig cfg;
    take(doc, "preset", cfg.preset, "config");
    if (cfg.preset == "image") {
        cfg.train = TrainConfig::image();
    } else if (cfg.preset == "desk_toy") {
        cfg.train = TrainConfig::desk_toy();
    } else {
        throw FormatError("config: unknown preset '" + cfg.preset + "' (expected image or desk_toy)");
    }

    TrainConfig& t = cfg.train;
    take(doc, "seed", t.seed, "config");
    std::string data, out_dir = cfg.out_dir.string();
    take(doc, "data", data, "config");
    take(doc, "out_dir", out_dir, "config");
    take(doc, "log_every", cfg.log_every, "config");
    if (data.empty()) throw FormatError("config: 'data' is required");
    cfg.data = resolve(data, base_dir);
    cfg.out_dir = resolve(out_dir, base_dir);

    if (doc.contains("train")) {
        const json& j = doc.at("train");
        check_keys(j, {"lr", "weight_decay", "epochs", "batch_size", "lr_decay_factor", "lr_decay_every",
                       "steps_per_epoch", "beta1", "beta2", "adam_eps"},
                   "train");
        take(j, "lr", t.lr, "train");
        take(j, "weight_decay", t.weight_decay, "train");
        take(j, "epochs", t.epochs, "train");
        take(j, "batch_size", t.batch_size, "train");
        take(j, "lr_decay_factor", t.lr_decay_factor, "train");
        take(j, "lr_decay_every", t.lr_decay_every, "train");
        take(j, "steps_per_epoch", t.steps_per_epoch, "train");
        take(j, "beta1", t.beta1, "train");
        take(j, "beta2", t.beta2, "train");
        take(j, "adam_eps", t.adam_eps, "train");
    }
    if (doc.contains("path")) {
        const json& j = doc.at("path");
        check_keys(j, {"kind", "epsilon", "t_min", "horizon"}, "path");
        std::string kind = to_string(t.path.kind);
        take(j, "kind", kind, "path");
        t.path.kind = parse_path_kind(kind);
        take(j, "epsilon", t.path.epsilon, "path");
        take(j, "t_min", t.path.t_min, "path");
        take(j, "horizon", t.path.horizon, "path");
    }
    if (doc.contains("wt")) {
        const json& j = doc.at("wt");
        check_keys(j, {"enabled", "eps", "mode"}, "wt");
        take(j, "enabled", t.wt_enabled, "wt");
        take(j, "eps", t.wt_eps, "wt");
        std::string mode = to_string(t.wt_mode);
        take(j, "mode", mode, "wt");
        t.wt_mode = parse_wt_mode(mode);
    }
    if (doc.contains("model")) {
        const json& j = doc.at("model");
        check_keys(j, {"hidden", "time_dim", "omega_min", "omega_max", "activation"}, "model");
        if (j.contains("hidden")) {
            const json& h = j.at("hidden");
            if (!h.is_array()) throw FormatError("config: model.hidden must be an array of widths");
            cfg.model.hidden.clear();
            for (const json& w : h) {
                if (!w.is_number_unsigned()) throw FormatError("config: model.hidden entries must be positive integers");
                cfg.model.hidden.push_back(w.get<std::size_t>());
            }
        }
        take(j, "time_dim", cfg.model.time.dim, "model");
        take(j, "omega_min", cfg.model.time.omega_min, "model");
        take(j, "omega_max", cfg.model.time.omega_max, "model");
        std::string act = to_string(cfg.model.activation);
        take(j, "activation", act, "model");
        cfg.model.activation = parse_activation(act);
    }

    try {
        t.validate();
        cfg.model.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("config " + path.string() + ": " + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

json to_json(const RunConfig& cfg) {
    const TrainConfig& t = cfg.train;
    return json{
        {"preset", cfg.preset},
        {"seed", t.seed},
        {"data", cfg.data.string()},
        {"out_dir", cfg.out_dir.string()},
        {"log_every", cfg.log_every},
        {"train",
         {{"lr", t.lr},
          {"weight_decay", t.weight_decay},
          {"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr_decay_factor", t.lr_decay_factor},
          {"lr_decay_every", t.lr_decay_every},
          {"steps_per_epoch", t.steps_per_epoch},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"adam_eps", t.adam_eps}}},
        {"path",
         {{"kind", to_string(t.path.kind)},
          {"epsilon", t.path.epsilon},
          {"t_min", t.path.t_min},
          {"horizon", t.path.horizon}}},
        {"wt", {{"enabled", t.wt_enabled}, {"eps", t.wt_eps}, {"mode", to_string(t.wt_mode)}}},
        {"model",
         {{"hidden", cfg.model.hidden},
          {"time_dim", cfg.model.time.dim},
          {"omega_min", cfg.model.time.omega_min},
          {"omega_max", cfg.model.time.omega_max},
          {"activation", to_string(cfg.model.activation)}}},
    };
}

} // namespace wtflow::cli
