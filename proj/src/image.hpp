#ifndef SFG_IMAGE_HPP
#define SFG_IMAGE_HPP

#include <string>
#include <vector>

#include "bounds.hpp"

namespace sfg {

// A typed n-d array over an integer box. Dim 0 varies fastest (matching the
// innermost-first coordinate order of function definitions).
class Buffer {
public:
    Buffer() = default;
    Buffer(NumericType t, IntervalBox box);

    const IntervalBox &box() const { return box_; }
    NumericType type() const { return type_; }
    int dims() const { return box_.dims(); }
    int64_t size() const { return int64_t(ints_.size() + floats_.size()); }
    bool defined() const { return box_.dims() > 0; }

    int64_t linear_index(const std::vector<int64_t> &pt) const;
    bool in_bounds(const std::vector<int64_t> &pt) const { return box_.contains(pt); }

    Scalar get(const std::vector<int64_t> &pt) const;
    void set(const std::vector<int64_t> &pt, const Scalar &v);

    Scalar get_linear(int64_t idx) const;
    void set_linear(int64_t idx, const Scalar &v);

    void fill(const Scalar &v);
    bool same_pixels(const Buffer &o) const;

private:
    NumericType type_;
    IntervalBox box_;
    std::vector<int64_t> strides_;
    std::vector<int64_t> ints_;
    std::vector<float> floats_;
};

// Image I/O. PGM (P5) for u8 2-d, PPM (P6) for u8 3-d with 3 channels
// (dims: c, x, y); anything else is raw little-endian with a JSON sidecar
// at <path>.json carrying {type, extents}.
Buffer read_image(const std::string &path);
void write_image(const Buffer &img, const std::string &path);

}  // namespace sfg

#endif
