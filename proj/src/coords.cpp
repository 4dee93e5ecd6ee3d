#include "steinmc/coords.hpp"

namespace steinmc {

SampleBatch sample_batch(std::size_t n, std::size_t dim,
                         const CoordDraw& draw_coord, RngStream& rng) {
  SampleBatch batch{CoordMatrix(n, dim), CoordMatrix(n, dim),
                    CoordMatrix(n, dim)};
  for (std::size_t i = 0; i < n; ++i) draw_coord(rng, batch.x.mutable_row(i));
  for (std::size_t i = 0; i < n; ++i)
    draw_coord(rng, batch.x_prime.mutable_row(i));
  for (std::size_t i = 0; i < n; ++i)
    draw_coord(rng, batch.x_tilde.mutable_row(i));
  return batch;
}

}  // namespace steinmc
