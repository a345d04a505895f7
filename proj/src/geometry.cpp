#include "d2dcache/geometry.hpp"

#include "d2dcache/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace d2dcache {

std::string_view to_string(Environment env)
{
    return env == Environment::Office ? "office" : "hotspot";
}

Environment parse_environment(std::string_view text)
{
    if (text == "office") {
        return Environment::Office;
    }
    if (text == "hotspot") {
        return Environment::Hotspot;
    }
    throw std::invalid_argument("unknown environment '" + std::string(text) + "'");
}

std::string_view to_string(PlacementMode mode)
{
    return mode == PlacementMode::Grid ? "grid" : "uniform";
}

PlacementMode parse_placement(std::string_view text)
{
    if (text == "grid") {
        return PlacementMode::Grid;
    }
    if (text == "uniform") {
        return PlacementMode::UniformRandom;
    }
    throw std::invalid_argument("unknown placement mode '" + std::string(text) + "'");
}

namespace {
constexpr std::string_view kScenarioNames[] = {"A1", "A2", "B1", "B4", "C2", "C4"};
}

std::string_view to_string(Scenario s)
{
    return kScenarioNames[static_cast<int>(s)];
}

Scenario parse_scenario(std::string_view text)
{
    for (int i = 0; i < 6; ++i) {
        if (kScenarioNames[i] == text) {
            return static_cast<Scenario>(i);
        }
    }
    throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

Box CellLayout::building_box(int index) const
{
    const double pitch = building_side + street_width;
    const int col = index % buildings_per_axis;
    const int row = index / buildings_per_axis;
    return Box{margin + col * pitch, margin + row * pitch, building_side};
}

int CellLayout::building_at(Point p) const
{
    if (buildings_per_axis == 0) {
        return kOutdoor;
    }
    const double pitch = building_side + street_width;
    auto axis = [&](double v) {
        const double u = v - margin;
        if (u < 0.0) {
            return -1;
        }
        const auto i = static_cast<int>(std::floor(u / pitch));
        if (i >= buildings_per_axis) {
            return -1;
        }
        return (u - i * pitch) <= building_side ? i : -1;
    };
    const int col = axis(p.x);
    const int row = axis(p.y);
    if (col < 0 || row < 0) {
        return kOutdoor;
    }
    return col + row * buildings_per_axis;
}

int CellLayout::offices_per_axis() const
{
    if (office_side <= 0.0) {
        return 1;
    }
    return std::max(1, static_cast<int>(std::floor(building_side / office_side)));
}

int CellLayout::office_column(int building, double x) const
{
    if (office_side <= 0.0) {
        return 0;
    }
    const Box box = building_box(building);
    const int c = static_cast<int>(std::floor((x - box.x0) / office_side));
    return std::clamp(c, 0, offices_per_axis() - 1);
}

int CellLayout::office_row(int building, double y) const
{
    if (office_side <= 0.0) {
        return 0;
    }
    const Box box = building_box(building);
    const int r = static_cast<int>(std::floor((y - box.y0) / office_side));
    return std::clamp(r, 0, offices_per_axis() - 1);
}

int CellLayout::office_at(int building, Point p) const
{
    if (building == kOutdoor) {
        return kOutdoor;
    }
    return office_column(building, p.x) + office_row(building, p.y) * offices_per_axis();
}

namespace {

/// Slab test: does segment a-b pass through the interior of box?
bool segment_intersects_box(Point a, Point b, const Box& box)
{
    double t0 = 0.0;
    double t1 = 1.0;
    const double d[2] = {b.x - a.x, b.y - a.y};
    const double o[2] = {a.x, a.y};
    const double lo[2] = {box.x0, box.y0};
    const double hi[2] = {box.x0 + box.side, box.y0 + box.side};
    for (int k = 0; k < 2; ++k) {
        if (std::abs(d[k]) < 1e-15) {
            if (o[k] <= lo[k] || o[k] >= hi[k]) {
                return false;
            }
            continue;
        }
        double ta = (lo[k] - o[k]) / d[k];
        double tb = (hi[k] - o[k]) / d[k];
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) {
            return false;
        }
    }
    return t1 - t0 > 1e-12;
}

struct Exit {
    double length = 0.0;
    double incidence_cos = 1.0;
};

/// Portion of the segment from `inside` towards `other` that stays inside box.
Exit indoor_portion(Point inside, Point other, const Box& box)
{
    const double vx = other.x - inside.x;
    const double vy = other.y - inside.y;
    const double len = std::hypot(vx, vy);
    if (len <= 0.0) {
        return {};
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    double tx = inf;
    double ty = inf;
    if (vx > 0.0) {
        tx = (box.x0 + box.side - inside.x) / vx;
    } else if (vx < 0.0) {
        tx = (box.x0 - inside.x) / vx;
    }
    if (vy > 0.0) {
        ty = (box.y0 + box.side - inside.y) / vy;
    } else if (vy < 0.0) {
        ty = (box.y0 - inside.y) / vy;
    }
    const double t = std::min(tx, ty);
    if (t >= 1.0) {
        return {len, 1.0};
    }
    const double normal = tx <= ty ? std::abs(vx) : std::abs(vy);
    return {std::max(0.0, t) * len, normal / len};
}

} // namespace

bool CellLayout::segment_hits_building(Point a, Point b) const
{
    if (buildings_per_axis == 0) {
        return false;
    }
    const double pitch = building_side + street_width;
    auto range = [&](double lo, double hi) {
        int i0 = static_cast<int>(std::floor((lo - margin) / pitch));
        int i1 = static_cast<int>(std::floor((hi - margin) / pitch));
        return std::pair{std::max(i0, 0), std::min(i1, buildings_per_axis - 1)};
    };
    const auto [c0, c1] = range(std::min(a.x, b.x), std::max(a.x, b.x));
    const auto [r0, r1] = range(std::min(a.y, b.y), std::max(a.y, b.y));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (segment_intersects_box(a, b, building_box(c + r * buildings_per_axis))) {
                return true;
            }
        }
    }
    return false;
}

CellLayout build_layout(Environment environment, double cell_side)
{
    if (!(cell_side > 0.0)) {
        throw std::invalid_argument("cell_side must be positive");
    }
    CellLayout layout;
    layout.environment = environment;
    layout.cell_side = cell_side;
    if (environment == Environment::Office) {
        layout.building_side = 50.0;
        layout.street_width = 10.0;
        layout.office_side = 6.2;
    } else {
        layout.building_side = 100.0;
        layout.street_width = 20.0;
        layout.office_side = 0.0;
    }
    const double pitch = layout.building_side + layout.street_width;
    layout.buildings_per_axis = static_cast<int>(std::floor(cell_side / pitch));
    const int count = layout.buildings_per_axis;
    const double span =
        count > 0 ? count * layout.building_side + (count - 1) * layout.street_width : 0.0;
    layout.margin = (cell_side - span) / 2.0;
    layout.bs_position = Point{cell_side / 2.0, cell_side / 2.0};
    return layout;
}

NodePlacement place_nodes(const CellLayout& layout, int n, PlacementMode mode, std::uint64_t seed)
{
    if (n < 1) {
        throw std::invalid_argument("place_nodes: n must be at least 1");
    }
    NodePlacement out;
    out.mode = mode;
    out.seed = seed;
    out.positions.reserve(n);
    if (mode == PlacementMode::Grid) {
        const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        if (side * side != n) {
            throw std::invalid_argument("place_nodes: grid mode needs a perfect-square n, got " +
                                        std::to_string(n));
        }
        const double pitch = layout.cell_side / side;
        for (int r = 0; r < side; ++r) {
            for (int c = 0; c < side; ++c) {
                out.positions.push_back(Point{(c + 0.5) * pitch, (r + 0.5) * pitch});
            }
        }
    } else {
        StreamEngine rng = make_stream(seed, StreamTag::Placement);
        std::uniform_real_distribution<double> coord(0.0, layout.cell_side);
        for (int i = 0; i < n; ++i) {
            const double x = coord(rng);
            const double y = coord(rng);
            out.positions.push_back(Point{x, y});
        }
    }
    out.building.reserve(n);
    out.office.reserve(n);
    for (const auto& p : out.positions) {
        const int b = layout.building_at(p);
        out.building.push_back(b);
        out.office.push_back(layout.office_at(b, p));
    }
    return out;
}

LinkGeometry classify_link(const CellLayout& layout, Endpoint tx, Endpoint rx)
{
    if (tx.kind == EndpointKind::BaseStation && rx.kind == EndpointKind::BaseStation) {
        throw std::invalid_argument("classify_link: base station to base station link");
    }
    LinkGeometry g;
    g.distance = distance(tx.position, rx.position);

    const int b_tx =
        tx.kind == EndpointKind::BaseStation ? kOutdoor : layout.building_at(tx.position);
    const int b_rx =
        rx.kind == EndpointKind::BaseStation ? kOutdoor : layout.building_at(rx.position);

    if (tx.kind == EndpointKind::BaseStation || rx.kind == EndpointKind::BaseStation) {
        const Endpoint& dev = tx.kind == EndpointKind::BaseStation ? rx : tx;
        const Endpoint& bs = tx.kind == EndpointKind::BaseStation ? tx : rx;
        const int b = tx.kind == EndpointKind::BaseStation ? b_rx : b_tx;
        if (b == kOutdoor) {
            g.scenario = Scenario::BsOutdoorC2;
        } else {
            g.scenario = Scenario::BsIndoorC4;
            const Exit e = indoor_portion(dev.position, bs.position, layout.building_box(b));
            g.d_in = e.length;
            g.incidence_cos = e.incidence_cos;
        }
        return g;
    }

    if (b_tx == kOutdoor && b_rx == kOutdoor) {
        g.scenario = Scenario::OutdoorB1;
        g.crosses_building = layout.segment_hits_building(tx.position, rx.position);
        return g;
    }
    if (b_tx != kOutdoor && b_rx != kOutdoor && b_tx == b_rx) {
        g.scenario = Scenario::IndoorA1;
        const int dc = std::abs(layout.office_column(b_tx, tx.position.x) -
                                layout.office_column(b_rx, rx.position.x));
        const int dr = std::abs(layout.office_row(b_tx, tx.position.y) -
                                layout.office_row(b_rx, rx.position.y));
        g.walls = dc + dr;
        g.same_office = g.walls == 0;
        return g;
    }
    if (b_tx != kOutdoor && b_rx != kOutdoor) {
        // two different buildings: indoor-to-outdoor model over the full distance,
        // indoor path summed over both ends
        g.scenario = Scenario::IndoorToOutdoorA2;
        const Exit a = indoor_portion(tx.position, rx.position, layout.building_box(b_tx));
        const Exit b = indoor_portion(rx.position, tx.position, layout.building_box(b_rx));
        g.d_in = std::min(a.length + b.length, g.distance);
        g.incidence_cos = a.incidence_cos;
        g.crosses_building = true;
        return g;
    }
    const bool tx_indoor = b_tx != kOutdoor;
    g.scenario = tx_indoor ? Scenario::IndoorToOutdoorA2 : Scenario::OutdoorToIndoorB4;
    const Endpoint& inside = tx_indoor ? tx : rx;
    const Endpoint& outside = tx_indoor ? rx : tx;
    const Exit e =
        indoor_portion(inside.position, outside.position, layout.building_box(tx_indoor ? b_tx : b_rx));
    g.d_in = e.length;
    g.incidence_cos = e.incidence_cos;
    g.crosses_building = true;
    return g;
}

} // namespace d2dcache
