#pragma once

#include <string>
#include <vector>

#include "taxo/classification.hpp"
#include "taxo/taxonomy.hpp"

namespace taxo {

/// One classification drawn over the morphological box. `label` feeds the
/// legend (defaults to the asset name when empty); `fill` is the SVG cell
/// color for this overlay.
struct RenderOverlay {
    AssetClassification classification;
    std::string label;
    std::string fill;
};

enum class RenderFormat { text, svg };

/// A morphological-box rendering job: the taxonomy grid with up to two
/// overlays. Overlay 1 marks cells [1] / first fill, overlay 2 [2] /
/// second fill, cells selected by both [12] / striped fill.
struct RenderSpec {
    Taxonomy taxonomy;
    std::vector<RenderOverlay> overlays;  ///< at most 2
    RenderFormat format = RenderFormat::text;
};

inline constexpr const char* kDefaultOverlayFills[2] = {"#6abf69", "#ef8a3c"};

/// Renders the job as a monospaced text grid or an SVG 1.1 document
/// (one rect per characteristic cell). Deterministic output. Throws
/// Error on more than two overlays, ValidationFailure on an overlay that
/// is invalid in partial mode.
std::string render(const RenderSpec& spec);

std::string render_text(const Taxonomy& t, const std::vector<RenderOverlay>& overlays);
std::string render_svg(const Taxonomy& t, const std::vector<RenderOverlay>& overlays);

}  // namespace taxo
