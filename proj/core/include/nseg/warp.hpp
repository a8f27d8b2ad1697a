#pragma once

#include "nseg/field.hpp"
#include "nseg/image.hpp"

namespace nseg {

/// forward: each source pixel is written to its displaced target (scatter).
/// backward: each output pixel reads from its displaced source (gather).
enum class Mapping { forward, backward };

enum class Interpolation { nearest, bilinear };

/// What to do with forward-scatter holes in label masks.
enum class HoleFill { ignore_label, nearest_source };

/// Labels are always sampled nearest; `image_interp` only applies to images
/// in backward mode.
struct WarpSpec {
  Mapping mapping = Mapping::forward;
  Interpolation image_interp = Interpolation::nearest;
  HoleFill fill = HoleFill::ignore_label;

  friend bool operator==(const WarpSpec&, const WarpSpec&) = default;
};

/// min(max(round(v), 0), dim - 1) with ties rounded away from zero.
int clamp_index(double v, int dim);

/// Forward: output starts as all-ignore, every non-ignore source pixel writes
/// its class at (clamp(x + dx), clamp(y + dy)); writes happen in row-major
/// source order and the last writer wins. Ignore source pixels belong to no
/// class and write nothing. Backward: output(x, y) = mask(clamp(x - dx),
/// clamp(y - dy)).
LabelMask warp_label(const LabelMask& mask, const DisplacementField& field,
                     const WarpSpec& spec);

/// Same geometry as warp_label applied to every channel. Forward holes are 0.
ImagePlane warp_image(const ImagePlane& image, const DisplacementField& field,
                      const WarpSpec& spec);

}  // namespace nseg
