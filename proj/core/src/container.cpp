// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/container.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "detail/bytes.hpp"
#include "wtflow/error.hpp"

namespace wtflow {

std::size_t dtype_size(DType dtype) {
    switch (dtype) {
    case DType::F32: return 4;
    case DType::F64: return 8;
    }
    throw InvalidArgument("unknown dtype");
}

std::vector<std::uint8_t> encode_container(const Tensor& tensor, DType dtype) {
    if (!tensor.all_finite()) throw InvalidArgument("container: tensor has non-finite values");
    if (tensor.rank() > kContainerMaxRank) throw InvalidArgument("container: rank too large");
    detail::ByteWriter w;
    w.raw(kContainerMagic, 4);
    w.u32(kContainerVersion);
    w.u32(static_cast<std::uint32_t>(dtype));
    w.u32(static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) {
        if (d > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("container: dim exceeds u32");
        w.u32(static_cast<std::uint32_t>(d));
    }
    if (dtype == DType::F64) {
        w.f64s(tensor.data().data(), tensor.size());
    } else {
        for (double v : tensor.data()) {
            const float f = static_cast<float>(v);
            if (!std::isfinite(f)) throw InvalidArgument("container: value overflows f32");
            w.f32(f);
        }
    }
    return w.take();
}

FeatureContainer decode_container(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes, "container");
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kContainerMagic, 4) != 0) throw FormatError("container: bad magic");
    if (const std::uint32_t v = r.u32(); v != kContainerVersion) {
        throw FormatError("container: unsupported version " + std::to_string(v));
    }
    const std::uint32_t code = r.u32();
    if (code > 1) throw FormatError("container: unknown dtype code " + std::to_string(code));
    const auto dtype = static_cast<DType>(code);
    const std::uint32_t ndim = r.u32();
    if (ndim > kContainerMaxRank) throw FormatError("container: rank " + std::to_string(ndim) + " too large");

    Shape shape(ndim);
    std::size_t count = 1;
    for (auto& d : shape) {
        d = r.u32();
        if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d) {
            throw FormatError("container: dims overflow the addressable size");
        }
        count *= d;
    }
    const std::size_t width = dtype_size(dtype);
    if (count > std::numeric_limits<std::size_t>::max() / width) {
        throw FormatError("container: payload size overflows");
    }
    r.need_elements(count, width);

    std::vector<double> values(count);
    if (dtype == DType::F64) {
        r.raw(values.data(), count * width);
    } else {
        for (auto& v : values) {
            float f;
            r.raw(&f, sizeof f);
            v = f;
        }
    }
    r.expect_end();
    return FeatureContainer{Tensor(std::move(shape), std::move(values)), dtype};
}

void write_container(const std::filesystem::path& path, const Tensor& tensor, DType dtype) {
    detail::write_file(path, encode_container(tensor, dtype));
}

FeatureContainer read_container(const std::filesystem::path& path) {
    return decode_container(detail::read_file(path));
}

} // namespace wtflow
