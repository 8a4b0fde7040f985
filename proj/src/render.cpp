#include "taxo/render.hpp"

#include <algorithm>
#include <sstream>

namespace taxo {

namespace {

void check_overlays(const Taxonomy& t, const std::vector<RenderOverlay>& overlays) {
    if (overlays.size() > 2)
        throw Error("at most two overlays are supported, got " + std::to_string(overlays.size()));
    for (const auto& overlay : overlays)
        require_valid(t, overlay.classification, ValidationMode::partial);
}

bool cell_selected(const RenderOverlay& overlay, const std::string& attr_id,
                   const std::string& char_id) {
    auto it = overlay.classification.selections.find(attr_id);
    return it != overlay.classification.selections.end() &&
           it->second.characteristic_ids.contains(char_id);
}

// 0 = unmarked, 1 = overlay 1, 2 = overlay 2, 3 = both.
int cell_mark(const std::vector<RenderOverlay>& overlays, const std::string& attr_id,
              const std::string& char_id) {
    int mark = 0;
    if (overlays.size() > 0 && cell_selected(overlays[0], attr_id, char_id)) mark |= 1;
    if (overlays.size() > 1 && cell_selected(overlays[1], attr_id, char_id)) mark |= 2;
    return mark;
}

std::string legend_label(const RenderOverlay& overlay) {
    return overlay.label.empty() ? overlay.classification.asset_name : overlay.label;
}

std::string pad(const std::string& text, std::size_t width) {
    return text + std::string(width - text.size(), ' ');
}

}  // namespace

// ---------------------------------------------------------------------------
// Text grid

std::string render_text(const Taxonomy& t, const std::vector<RenderOverlay>& overlays) {
    check_overlays(t, overlays);
    static const char* kMarkers[4] = {"    ", "[1] ", "[2] ", "[12]"};

    std::size_t name_w = 0;
    for (const auto& attr : t.attributes) name_w = std::max(name_w, attr.name.size());
    name_w += 2;

    std::ostringstream os;
    os << t.name << " " << t.version << "\n\n";
    for (const auto& attr : t.attributes) {
        std::size_t label_w = 0;
        for (const auto& ch : attr.characteristics) label_w = std::max(label_w, ch.label.size());
        label_w += 2;

        os << pad(attr.name, name_w);
        for (const auto& ch : attr.characteristics)
            os << "| " << kMarkers[cell_mark(overlays, attr.id, ch.id)] << " "
               << pad(ch.label, label_w);
        os << "|\n";
    }
    if (!overlays.empty()) {
        os << "\n";
        for (std::size_t i = 0; i < overlays.size(); ++i)
            os << "[" << (i + 1) << "] " << legend_label(overlays[i]) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr int kMargin = 16;
constexpr int kLabelW = 250;
constexpr int kCellW = 180;
constexpr int kCellH = 28;
constexpr int kGap = 6;
constexpr int kLegendRow = 22;

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Taxonomy& t, const std::vector<RenderOverlay>& overlays) {
    check_overlays(t, overlays);

    const std::string fills[2] = {
        overlays.size() > 0 && !overlays[0].fill.empty() ? overlays[0].fill
                                                         : kDefaultOverlayFills[0],
        overlays.size() > 1 && !overlays[1].fill.empty() ? overlays[1].fill
                                                         : kDefaultOverlayFills[1],
    };

    std::size_t max_cols = 0;
    for (const auto& attr : t.attributes) max_cols = std::max(max_cols, attr.characteristics.size());

    const int rows = static_cast<int>(t.attributes.size());
    const int width = 2 * kMargin + kLabelW + static_cast<int>(max_cols) * (kCellW + kGap) - kGap;
    const int grid_h = rows * (kCellH + kGap) - kGap;
    const int legend_h = overlays.empty() ? 0 : 14 + static_cast<int>(overlays.size()) * kLegendRow;
    const int height = 2 * kMargin + grid_h + legend_h;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    // Striped fill for cells selected by both overlays. Paths, not rects:
    // cell rectangles stay countable as one rect per characteristic.
    os << "  <defs>\n"
       << "    <pattern id=\"overlap\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\">\n"
       << "      <path d=\"M0 0H8V8H0Z\" fill=\"" << fills[0] << "\"/>\n"
       << "      <path d=\"M-2 2L2 -2M0 8L8 0M6 10L10 6\" stroke=\"" << fills[1]
       << "\" stroke-width=\"3\"/>\n"
       << "    </pattern>\n"
       << "  </defs>\n";
    os << "  <g font-family=\"monospace\" font-size=\"13\">\n";

    for (int row = 0; row < rows; ++row) {
        const auto& attr = t.attributes[static_cast<std::size_t>(row)];
        const int y = kMargin + row * (kCellH + kGap);
        os << "    <text x=\"" << kMargin << "\" y=\"" << (y + 19) << "\">"
           << xml_escape(attr.name) << "</text>\n";
        for (std::size_t col = 0; col < attr.characteristics.size(); ++col) {
            const auto& ch = attr.characteristics[col];
            const int x = kMargin + kLabelW + static_cast<int>(col) * (kCellW + kGap);
            const char* fill = "none";
            std::string overlap;
            switch (cell_mark(overlays, attr.id, ch.id)) {
                case 1: fill = fills[0].c_str(); break;
                case 2: fill = fills[1].c_str(); break;
                case 3:
                    overlap = "url(#overlap)";
                    fill = overlap.c_str();
                    break;
                default: break;
            }
            os << "    <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCellW
               << "\" height=\"" << kCellH << "\" fill=\"" << fill
               << "\" stroke=\"#555555\"/>\n";
            os << "    <text x=\"" << (x + 8) << "\" y=\"" << (y + 19) << "\">"
               << xml_escape(ch.label) << "</text>\n";
        }
    }

    if (!overlays.empty()) {
        const int base = kMargin + grid_h + 14;
        for (std::size_t i = 0; i < overlays.size(); ++i) {
            const int cy = base + static_cast<int>(i) * kLegendRow + kLegendRow / 2;
            os << "    <circle cx=\"" << (kMargin + 8) << "\" cy=\"" << cy
               << "\" r=\"7\" fill=\"" << fills[i] << "\" stroke=\"#555555\"/>\n";
            os << "    <text x=\"" << (kMargin + 24) << "\" y=\"" << (cy + 4) << "\">["
               << (i + 1) << "] " << xml_escape(legend_label(overlays[i])) << "</text>\n";
        }
    }

    os << "  </g>\n</svg>\n";
    return os.str();
}

std::string render(const RenderSpec& spec) {
    return spec.format == RenderFormat::svg ? render_svg(spec.taxonomy, spec.overlays)
                                            : render_text(spec.taxonomy, spec.overlays);
}

}  // namespace taxo
