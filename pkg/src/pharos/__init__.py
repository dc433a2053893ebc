"""Global-landmark visibility maps and landmark-enriched pedestrian navigation."""
from .geodesy import (Bearing, EnuOffset, GeoPoint, RelativeAngle, destination_point,
                      haversine_distance, initial_bearing, normalize_relative, to_local_enu)
from .terrain import HeightGrid, load_ascii_grid, sample_height, write_ascii_grid
from .visibility import (Clip, Landmark, Visibility, VisibilityMap, build_visibility_map_viewshed,
                         generate_grid, ingest_classifications, line_of_sight_visible,
                         lookup_visibility)
from .route import Route, TurnClass, extract_turning_points, parse_route, segment_headings
from .instructions import (Instruction, InstructionKind, RelativeSector,
                           generate_route_instructions, render_landmark_phrase, sector_of)

__version__ = "0.1.0"
