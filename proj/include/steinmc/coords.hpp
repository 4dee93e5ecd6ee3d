#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "steinmc/rng.hpp"

namespace steinmc {

// Which of the three independent copies a slot is read from.
enum class Source : std::uint8_t { base, prime, tilde };

// Flat row-major storage for n coordinates of fixed dimension.
class CoordMatrix {
 public:
  CoordMatrix() = default;
  CoordMatrix(std::size_t n, std::size_t dim)
      : n_(n), dim_(dim), data_(n * dim, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_row(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Three mutually independent copies of the coordinate vector.  Immutable
// after construction; all resampling is done through views.
struct SampleBatch {
  CoordMatrix x;
  CoordMatrix x_prime;
  CoordMatrix x_tilde;

  std::size_t n() const { return x.size(); }
  std::size_t dim() const { return x.dim(); }

  const CoordMatrix& copy(Source s) const {
    switch (s) {
      case Source::base: return x;
      case Source::prime: return x_prime;
      default: return x_tilde;
    }
  }
};

// Draws one coordinate into the given row.
using CoordDraw = std::function<void(RngStream&, std::span<double>)>;

// Batch with i.i.d. coordinates across all three copies.
SampleBatch sample_batch(std::size_t n, std::size_t dim,
                         const CoordDraw& draw_coord, RngStream& rng);

// Non-owning, type-erased coordinate accessor handed to functionals.
class CoordView {
 public:
  using RowFn = std::span<const double> (*)(const void*, std::size_t);

  CoordView(const void* obj, RowFn fn, std::size_t n, std::size_t dim)
      : obj_(obj), fn_(fn), n_(n), dim_(dim) {}

  CoordView(const CoordMatrix& m)  // NOLINT: implicit by design
      : CoordView(&m,
                  [](const void* o, std::size_t i) {
                    return static_cast<const CoordMatrix*>(o)->row(i);
                  },
                  m.size(), m.dim()) {}

  std::span<const double> row(std::size_t i) const { return fn_(obj_, i); }
  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

 private:
  const void* obj_;
  RowFn fn_;
  std::size_t n_;
  std::size_t dim_;
};

// Pure substitution view over a batch: per-slot source selection.  The
// underlying copies are never touched.
class RecombinedVector {
 public:
  explicit RecombinedVector(const SampleBatch& batch)
      : batch_(&batch), sources_(batch.n(), Source::base) {}

  std::size_t size() const { return sources_.size(); }
  std::size_t dim() const { return batch_->dim(); }

  Source source(std::size_t i) const { return sources_[i]; }
  void set_source(std::size_t i, Source s) {
    if (i >= sources_.size())
      throw std::out_of_range("RecombinedVector: slot index out of range");
    sources_[i] = s;
  }

  std::span<const double> row(std::size_t i) const {
    return batch_->copy(sources_[i]).row(i);
  }

  operator CoordView() const {  // NOLINT: implicit by design
    return CoordView(this,
                     [](const void* o, std::size_t i) {
                       return static_cast<const RecombinedVector*>(o)->row(i);
                     },
                     size(), dim());
  }

  const SampleBatch& batch() const { return *batch_; }

 private:
  const SampleBatch* batch_;
  std::vector<Source> sources_;
};

}  // namespace steinmc
