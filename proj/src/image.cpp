#include "image.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sfg {

Buffer::Buffer(NumericType t, IntervalBox box) : type_(t), box_(std::move(box)) {
    strides_.resize(box_.dims());
    int64_t s = 1;
    for (int d = 0; d < box_.dims(); d++) {
        strides_[d] = s;
        s *= box_.extent[d];
    }
    if (t.is_float()) {
        floats_.assign(size_t(s), 0.0f);
    } else {
        ints_.assign(size_t(s), 0);
    }
}

int64_t Buffer::linear_index(const std::vector<int64_t> &pt) const {
    SFG_INTERNAL_ASSERT(int(pt.size()) == box_.dims());
    int64_t idx = 0;
    for (int d = 0; d < box_.dims(); d++) {
        idx += (pt[d] - box_.min[d]) * strides_[d];
    }
    return idx;
}

Scalar Buffer::get(const std::vector<int64_t> &pt) const { return get_linear(linear_index(pt)); }

void Buffer::set(const std::vector<int64_t> &pt, const Scalar &v) {
    set_linear(linear_index(pt), v);
}

Scalar Buffer::get_linear(int64_t idx) const {
    if (type_.is_float()) return Scalar::make_float(floats_[size_t(idx)]);
    Scalar s;
    s.type = type_;
    s.i = ints_[size_t(idx)];
    return s;
}

void Buffer::set_linear(int64_t idx, const Scalar &v) {
    if (type_.is_float()) {
        floats_[size_t(idx)] = v.type.is_float() ? v.f : float(v.i);
    } else {
        ints_[size_t(idx)] = v.type.is_float() ? wrap_to_type(type_, int64_t(v.f))
                                               : wrap_to_type(type_, v.i);
    }
}

void Buffer::fill(const Scalar &v) {
    int64_t n = box_.volume();
    for (int64_t i = 0; i < n; i++) set_linear(i, v);
}

bool Buffer::same_pixels(const Buffer &o) const {
    if (!(box_ == o.box_) || type_ != o.type_) return false;
    return ints_ == o.ints_ && floats_ == o.floats_;
}

namespace {

bool has_suffix(const std::string &s, const char *suf) {
    size_t n = strlen(suf);
    return s.size() >= n && s.compare(s.size() - n, n, suf) == 0;
}

IntervalBox box_from_extents(const std::vector<int64_t> &ex) {
    IntervalBox b;
    b.min.assign(ex.size(), 0);
    b.extent = ex;
    return b;
}

}  // namespace

Buffer read_image(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open image '" + path + "'");

    if (has_suffix(path, ".pgm") || has_suffix(path, ".ppm")) {
        std::string magic;
        f >> magic;
        bool color = magic == "P6";
        if (!color && magic != "P5") throw Error("'" + path + "': unsupported format " + magic);
        auto next_int = [&]() {
            int64_t v;
            // skip whitespace and comment lines
            for (;;) {
                f >> std::ws;
                if (f.peek() == '#') {
                    std::string line;
                    std::getline(f, line);
                    continue;
                }
                break;
            }
            f >> v;
            return v;
        };
        int64_t w = next_int(), h = next_int(), maxval = next_int();
        if (maxval != 255) throw Error("'" + path + "': only 8-bit images are supported");
        f.get();  // single whitespace before payload
        std::vector<char> payload(size_t(w * h * (color ? 3 : 1)));
        f.read(payload.data(), std::streamsize(payload.size()));
        if (!f) throw Error("'" + path + "': truncated payload");
        Buffer img(u8(), box_from_extents(color ? std::vector<int64_t>{3, w, h}
                                                : std::vector<int64_t>{w, h}));
        // PGM/PPM scan order is row-major, channels interleaved: matches dim0-fastest
        for (size_t i = 0; i < payload.size(); i++) {
            img.set_linear(int64_t(i), Scalar::make_int(u8(), (unsigned char)payload[i]));
        }
        return img;
    }

    // raw + sidecar
    std::ifstream side(path + ".json");
    if (!side) throw Error("missing sidecar '" + path + ".json'");
    nlohmann::json meta = nlohmann::json::parse(side);
    NumericType t;
    if (!parse_type_name(meta.at("type").get<std::string>(), &t)) {
        throw Error("'" + path + ".json': bad element type");
    }
    std::vector<int64_t> extents = meta.at("extents").get<std::vector<int64_t>>();
    Buffer img(t, box_from_extents(extents));
    int bytes = t.bits / 8;
    std::vector<unsigned char> payload(size_t(img.box().volume() * bytes));
    f.read(reinterpret_cast<char *>(payload.data()), std::streamsize(payload.size()));
    if (!f) throw Error("'" + path + "': truncated payload");
    for (int64_t i = 0; i < img.box().volume(); i++) {
        uint64_t v = 0;
        for (int b = 0; b < bytes; b++) v |= uint64_t(payload[size_t(i * bytes + b)]) << (8 * b);
        if (t.is_float()) {
            float fv;
            uint32_t u = uint32_t(v);
            memcpy(&fv, &u, 4);
            img.set_linear(i, Scalar::make_float(fv));
        } else {
            img.set_linear(i, Scalar::make_int(t, int64_t(v)));
        }
    }
    return img;
}

void write_image(const Buffer &img, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write image '" + path + "'");
    const auto &ex = img.box().extent;

    bool pgm = has_suffix(path, ".pgm"), ppm = has_suffix(path, ".ppm");
    if (pgm || ppm) {
        if (img.type() != u8()) throw Error("PGM/PPM output requires u8 pixels");
        if (pgm && img.dims() != 2) throw Error("PGM output requires a 2-d image");
        if (ppm && (img.dims() != 3 || ex[0] != 3)) {
            throw Error("PPM output requires a 3-d image with 3 channels");
        }
        int64_t w = ex[pgm ? 0 : 1], h = ex[pgm ? 1 : 2];
        f << (ppm ? "P6" : "P5") << "\n" << w << " " << h << "\n255\n";
        for (int64_t i = 0; i < img.box().volume(); i++) {
            f.put(char(img.get_linear(i).i));
        }
        return;
    }

    int bytes = img.type().bits / 8;
    for (int64_t i = 0; i < img.box().volume(); i++) {
        Scalar s = img.get_linear(i);
        uint64_t v;
        if (img.type().is_float()) {
            uint32_t u;
            memcpy(&u, &s.f, 4);
            v = u;
        } else {
            v = uint64_t(wrap_to_type(img.type(), s.i)) &
                ((img.type().bits >= 64) ? ~0ull : ((1ull << img.type().bits) - 1));
        }
        for (int b = 0; b < bytes; b++) f.put(char((v >> (8 * b)) & 0xff));
    }
    nlohmann::ordered_json meta;
    meta["type"] = img.type().str();
    meta["extents"] = img.box().extent;
    std::ofstream side(path + ".json");
    side << meta.dump(2) << "\n";
}

}  // namespace sfg
