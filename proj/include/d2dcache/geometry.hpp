#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace d2dcache {

enum class Environment { Office, Hotspot };

std::string_view to_string(Environment env);
Environment parse_environment(std::string_view text);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

/// Axis-aligned square footprint.
struct Box {
    double x0 = 0.0;
    double y0 = 0.0;
    double side = 0.0;

    bool contains(Point p) const
    {
        return p.x >= x0 && p.x <= x0 + side && p.y >= y0 && p.y <= y0 + side;
    }
};

inline constexpr int kOutdoor = -1;

/**
 * Virtual cell: a square area holding a centered block of square buildings
 * separated by streets. Office buildings are partitioned into square
 * offices; hotspot buildings are open halls.
 */
struct CellLayout {
    Environment environment = Environment::Office;
    double cell_side = 600.0;
    double building_side = 50.0;
    double street_width = 10.0;
    double office_side = 6.2; ///< 0 for open halls
    Point bs_position{300.0, 300.0};
    double bs_height = 25.0;
    double ms_height = 1.5;

    int buildings_per_axis = 0;
    double margin = 0.0; ///< street margin between cell edge and first building

    int building_count() const { return buildings_per_axis * buildings_per_axis; }
    Box building_box(int index) const;

    /// Index of the building containing p, or kOutdoor.
    int building_at(Point p) const;
    bool is_indoor(Point p) const { return building_at(p) != kOutdoor; }

    int offices_per_axis() const;
    /// Office column/row inside the given building (clamped to the last office).
    int office_column(int building, double x) const;
    int office_row(int building, double y) const;
    int office_at(int building, Point p) const;

    /// True when the open segment a-b intersects any building footprint.
    bool segment_hits_building(Point a, Point b) const;
};

CellLayout build_layout(Environment environment, double cell_side);

enum class PlacementMode { Grid, UniformRandom };

std::string_view to_string(PlacementMode mode);
PlacementMode parse_placement(std::string_view text);

struct NodePlacement {
    std::vector<Point> positions;
    std::vector<int> building; ///< kOutdoor when outdoor
    std::vector<int> office;   ///< kOutdoor when outdoor
    PlacementMode mode = PlacementMode::UniformRandom;
    std::uint64_t seed = 0;

    std::size_t size() const { return positions.size(); }
    bool indoor(std::size_t i) const { return building[i] != kOutdoor; }
};

/// Grid mode requires n to be a perfect square; throws std::invalid_argument otherwise.
NodePlacement place_nodes(const CellLayout& layout, int n, PlacementMode mode, std::uint64_t seed);

enum class EndpointKind { Device, BaseStation };

enum class Scenario {
    IndoorA1,
    IndoorToOutdoorA2,
    OutdoorB1,
    OutdoorToIndoorB4,
    BsOutdoorC2,
    BsIndoorC4,
};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);

struct Endpoint {
    Point position;
    EndpointKind kind = EndpointKind::Device;
};

struct LinkGeometry {
    double distance = 0.0; ///< horizontal distance, meters
    Scenario scenario = Scenario::OutdoorB1;
    int walls = 0;                 ///< interior partitions crossed (A1 only)
    double d_in = 0.0;             ///< indoor path length for outdoor-indoor links
    double incidence_cos = 1.0;    ///< cos of the angle to the penetrated wall's normal
    bool crosses_building = false; ///< outdoor segment passes through a building
    bool same_office = false;      ///< A1 with both ends in one room
};

/**
 * Classifies a transmitter-receiver link. At most one endpoint may be the
 * base station, which is always treated as outdoor.
 */
LinkGeometry classify_link(const CellLayout& layout, Endpoint tx, Endpoint rx);

} // namespace d2dcache
