#pragma once

namespace ldp {

/// Serial runs the plain reference loop; parallel uses the OpenMP kernels.
/// Both produce bit-identical results for a fixed seed.
enum class ExecMode { serial, parallel };

}  // namespace ldp
