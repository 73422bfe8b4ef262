#pragma once
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "viewdrift/scene/types.hpp"
#include "viewdrift/surrogate/texture.hpp"

namespace viewdrift::surrogate {

// One face's slice of the texture. The paintable rect sits inside its
// quadrant with the aspect ratio of the physical face; window bands, wheel
// disks and mirror blocks are masked out and never receive gradient.
struct FaceRegion {
  int r0 = 0, c0 = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> attach;  // rows*cols, 1 = paintable

  // Pooling support, precomputed over paintable pixels.
  std::vector<int> pix;                      // flat texture index r*w + c
  std::vector<double> xn, yn;                // normalized coords in [-0.5, 0.5]
  std::vector<std::pair<int, int>> pairs;    // paintable 4-neighbor pairs (flat indices)

  bool attached(int r, int c) const { return attach[static_cast<std::size_t>(r) * cols + c] != 0; }
};

// Quadrant layout: front top-left, rear top-right, left bottom-left, right
// bottom-right. Regions are disjoint by construction.
struct FaceAtlas {
  int tex_h = 0, tex_w = 0;
  std::array<FaceRegion, 4> faces;  // scene::Face order

  static FaceAtlas build(int tex_h, int tex_w, const scene::VehicleSpec& spec);
};

// Resamples each face of src (laid out by src_atlas) onto the layout of
// dst_atlas, bilinear. Unmapped pixels keep mid gray.
Texture remap(const Texture& src, const FaceAtlas& src_atlas, const FaceAtlas& dst_atlas);

}  // namespace viewdrift::surrogate
