// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/checkpoint.hpp"

#include <cstring>
#include <limits>

#include "detail/bytes.hpp"
#include "wtflow/error.hpp"

namespace wtflow {
namespace {

std::uint32_t narrow(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgument(std::string("checkpoint: ") + what + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

std::uint32_t path_code(PathKind k) {
    switch (k) {
    case PathKind::ForwardRF: return 0;
    case PathKind::ForwardOT: return 1;
    case PathKind::ReverseRF: return 2;
    }
    return 0;
}

} // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    const ModelConfig& mc = ckpt.model.config();
    detail::ByteWriter w;
    w.raw(kCheckpointMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(narrow(mc.dim, "dim"));
    w.u32(narrow(mc.time.dim, "time dim"));
    w.f64(mc.time.omega_min);
    w.f64(mc.time.omega_max);
    w.u32(mc.activation == Activation::Silu ? 0 : 1);
    w.u32(narrow(mc.hidden.size(), "hidden count"));
    for (std::size_t h : mc.hidden) w.u32(narrow(h, "width"));
    for (const Layer& l : ckpt.model.layers()) {
        w.f64s(l.weight.data().data(), l.weight.size());
        w.f64s(l.bias.data().data(), l.bias.size());
    }
    w.u32(ckpt.wt ? 1 : 0);
    if (ckpt.wt) {
        const WTParams& p = *ckpt.wt;
        w.u32(p.mode == WTMode::PerChannel ? 0 : 1);
        w.f64(p.eps);
        w.u32(narrow(p.channels(), "channels"));
        for (const auto* v : {&p.gamma, &p.beta, &p.mean, &p.stddev}) {
            if (v->size() != p.channels()) throw InvalidArgument("checkpoint: inconsistent WT parameter sizes");
            w.f64s(v->data(), v->size());
        }
    }
    w.u32(path_code(ckpt.path.kind));
    w.f64(ckpt.path.epsilon);
    w.f64(ckpt.path.t_min);
    w.f64(ckpt.path.horizon);
    return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes, "checkpoint");
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
    if (const std::uint32_t v = r.u32(); v != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(v));
    }

    try {
        ModelConfig mc;
        mc.dim = r.u32();
        mc.time.dim = r.u32();
        mc.time.omega_min = r.f64();
        mc.time.omega_max = r.f64();
        const std::uint32_t act = r.u32();
        if (act > 1) throw FormatError("checkpoint: unknown activation code " + std::to_string(act));
        mc.activation = act == 0 ? Activation::Silu : Activation::Tanh;
        const std::uint32_t hidden = r.u32();
        r.need_elements(hidden, 4);
        mc.hidden.resize(hidden);
        for (auto& h : mc.hidden) h = r.u32();
        mc.validate();

        const auto widths = mc.widths();
        std::vector<Layer> layers;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
            const std::size_t in = widths[l];
            const std::size_t out = widths[l + 1];
            Tensor weight(Shape{in, out}, r.f64s(shape_product({in, out})));
            Tensor bias(Shape{out}, r.f64s(out));
            layers.push_back({std::move(weight), std::move(bias)});
        }

        std::optional<WTParams> wt;
        const std::uint32_t has_wt = r.u32();
        if (has_wt > 1) throw FormatError("checkpoint: bad WT flag");
        if (has_wt == 1) {
            WTParams p;
            const std::uint32_t mode = r.u32();
            if (mode > 1) throw FormatError("checkpoint: unknown WT mode");
            p.mode = mode == 0 ? WTMode::PerChannel : WTMode::Global;
            p.eps = r.f64();
            const std::uint32_t c = r.u32();
            p.gamma = r.f64s(c);
            p.beta = r.f64s(c);
            p.mean = r.f64s(c);
            p.stddev = r.f64s(c);
            wt = std::move(p);
        }

        PathSpec path;
        const std::uint32_t kind = r.u32();
        if (kind > 2) throw FormatError("checkpoint: unknown path kind");
        path.kind = kind == 0 ? PathKind::ForwardRF : kind == 1 ? PathKind::ForwardOT : PathKind::ReverseRF;
        path.epsilon = r.f64();
        path.t_min = r.f64();
        path.horizon = r.f64();
        r.expect_end();
        path.validate();
        if (wt && wt->channels() != mc.dim) throw FormatError("checkpoint: WT channels do not match model dim");

        return Checkpoint{VectorFieldModel(std::move(mc), std::move(layers)), std::move(wt), path};
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("checkpoint: inconsistent contents: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    detail::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(detail::read_file(path)); }

} // namespace wtflow
