#ifndef MAVG_GRAPH_IO_HPP
#define MAVG_GRAPH_IO_HPP

#include <string>
#include <vector>

#include "mavg/pose_graph.hpp"

namespace mavg {

/// One graph of a multi-graph container file.
struct NamedGraph {
    std::string name;
    ViewGraph graph;
};

/// Plain-text graph format, one record per line, '#' comments:
///   NODE <id> <focal> <width> <height>
///   EDGE <i> <j> <qw> <qx> <qy> <qz> <tx> <ty> <tz>
///   BOX  <i> <j> <xi> <yi> <wi> <hi> <xj> <yj> <wj> <hj>
///   GT   <id> <qw> <qx> <qy> <qz> <cx> <cy> <cz>
/// Floats are written with 17 significant digits so that
/// parse(serialize(g)) is exact and serialize is a fixed point.
ViewGraph parse_graph(const std::string& text);
std::string serialize_graph(const ViewGraph& g);

/// Multi-graph container: graphs separated by 'GRAPH <name>' header lines.
std::vector<NamedGraph> parse_dataset(const std::string& text);
std::string serialize_dataset(const std::vector<NamedGraph>& graphs);

/// Predicted poses, one line per camera:
///   POSE <graph> <node> <qw> <qx> <qy> <qz> <cx> <cy> <cz>
struct NamedPoses {
    std::string name;
    AbsolutePoseSet poses;
};
std::vector<NamedPoses> parse_poses(const std::string& text);
std::string serialize_poses(const std::vector<NamedPoses>& sets);

/// %.17g rendering used by every text emitter in the project.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace mavg

#endif // MAVG_GRAPH_IO_HPP
