#pragma once

#include <cstdint>
#include <string>

#include "bcdi/grid.hpp"

namespace bcdi {

enum class PhantomKind { file, disk, digit, blobs, testcard };

std::string to_string(PhantomKind kind);

/// A real, non-negative object and its zero-embedding on the detector grid.
struct Phantom {
  /// w×l, values in [0, 1].
  RealGrid object;
  /// W×L, object zero-padded about the DC pixel.
  RealGrid embedded;
  PhantomKind kind = PhantomKind::disk;
  /// Builtin spec ("digit:3") or file path.
  std::string source;

  double oversampling_x() const;
  double oversampling_y() const;
  double oversampling() const;
};

struct PhantomOptions {
  /// Object extent; {0, 0} means half the embed shape.
  Shape object_shape{0, 0};
  std::uint64_t seed = 0;
  /// Skips the oversampling ≥ 2 check. Only negative tests should need this.
  bool allow_undersampled = false;
};

/// Builtin sources: "disk[:radius]", "digit[:d]", "blobs[:count]", "testcard".
/// Anything else is read as a binary PGM. The object is scaled so its maximum
/// is 1 and centered in `embed`.
///
/// Throws IoError for unreadable files, ConfigError for unknown builtins, and
/// ShapeError when embed is less than twice the object or parities differ.
Phantom load_phantom(const std::string& source, Shape embed, const PhantomOptions& opts = {});

/// Wraps an existing object grid; same checks as load_phantom.
Phantom make_phantom(RealGrid object, Shape embed, PhantomKind kind, std::string source,
                     bool allow_undersampled = false);

RealGrid disk_object(Shape shape, double radius);
/// 5×7 bitmap glyph scaled into the shape with a light blur, MNIST-like.
RealGrid digit_object(Shape shape, int digit);
RealGrid blobs_object(Shape shape, int count, std::uint64_t seed);
/// Face-like card: head, eyes, mouth and a bar gauge.
RealGrid testcard_object(Shape shape);

}  // namespace bcdi
