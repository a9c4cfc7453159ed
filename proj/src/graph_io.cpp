#include "mavg/graph_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mavg {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

namespace {

struct Tokenizer {
    std::vector<std::string> tokens;
    int line_no = 0;

    double number(std::size_t idx, const char* what) const {
        const std::string& t = tokens.at(idx);
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size()) {
            throw ParseError(line_no, std::string("bad ") + what + " '" + t + "'");
        }
        return v;
    }

    long integer(std::size_t idx, const char* what) const {
        const std::string& t = tokens.at(idx);
        char* end = nullptr;
        const long v = std::strtol(t.c_str(), &end, 10);
        if (end != t.c_str() + t.size()) {
            throw ParseError(line_no, std::string("bad ") + what + " '" + t + "'");
        }
        return v;
    }

    void expect_count(std::size_t n) const {
        if (tokens.size() != n) {
            throw ParseError(line_no, "expected " + std::to_string(n - 1) + " fields after " +
                                          tokens[0] + ", got " + std::to_string(tokens.size() - 1));
        }
    }
};

std::vector<Tokenizer> tokenize(const std::string& text) {
    std::vector<Tokenizer> lines;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        Tokenizer t;
        t.line_no = line_no;
        std::istringstream ls(raw);
        std::string tok;
        while (ls >> tok) t.tokens.push_back(tok);
        if (!t.tokens.empty()) lines.push_back(std::move(t));
    }
    return lines;
}

class GraphBuilder {
public:
    void add_line(const Tokenizer& t) {
        const std::string& kind = t.tokens[0];
        if (kind == "NODE") {
            t.expect_count(5);
            CameraNode n;
            n.id = static_cast<NodeId>(t.integer(1, "node id"));
            n.focal = t.number(2, "focal");
            n.width = static_cast<int>(t.integer(3, "width"));
            n.height = static_cast<int>(t.integer(4, "height"));
            if (n.focal <= 0.0) throw ParseError(t.line_no, "focal must be positive");
            if (n.width <= 0 || n.height <= 0) throw ParseError(t.line_no, "image size must be positive");
            if (!ids_.insert(n.id).second) {
                throw ParseError(t.line_no, "duplicate node id " + std::to_string(n.id));
            }
            g_.nodes.push_back(n);
        } else if (kind == "EDGE") {
            t.expect_count(10);
            RelativePoseEdge e;
            e.i = static_cast<NodeId>(t.integer(1, "edge endpoint"));
            e.j = static_cast<NodeId>(t.integer(2, "edge endpoint"));
            if (e.i == e.j) throw ParseError(t.line_no, "self-loop edge on node " + std::to_string(e.i));
            require_node(e.i, t.line_no);
            require_node(e.j, t.line_no);
            const auto key = std::minmax(e.i, e.j);
            if (!pairs_.insert(key).second) {
                throw DuplicateEdge("line " + std::to_string(t.line_no) + ": duplicate edge {" +
                                    std::to_string(key.first) + "," + std::to_string(key.second) + "}");
            }
            e.rotation = UnitQuaternion(t.number(3, "qw"), t.number(4, "qx"),
                                        t.number(5, "qy"), t.number(6, "qz"));
            e.translation_dir = UnitVector3(
                Eigen::Vector3d(t.number(7, "tx"), t.number(8, "ty"), t.number(9, "tz")));
            edge_index_[key] = g_.edges.size();
            g_.edges.push_back(std::move(e));
        } else if (kind == "BOX") {
            t.expect_count(11);
            const NodeId i = static_cast<NodeId>(t.integer(1, "box endpoint"));
            const NodeId j = static_cast<NodeId>(t.integer(2, "box endpoint"));
            const auto it = edge_index_.find(std::minmax(i, j));
            if (it == edge_index_.end()) {
                throw ParseError(t.line_no, "BOX without preceding EDGE " + std::to_string(i) + " " +
                                                std::to_string(j));
            }
            DetectionBox bi{t.number(3, "x"), t.number(4, "y"), t.number(5, "w"), t.number(6, "h")};
            DetectionBox bj{t.number(7, "x"), t.number(8, "y"), t.number(9, "w"), t.number(10, "h")};
            if (bi.bb_w <= 0 || bi.bb_h <= 0 || bj.bb_w <= 0 || bj.bb_h <= 0) {
                throw ParseError(t.line_no, "box sides must be positive");
            }
            g_.edges[it->second].boxes.emplace_back(bi, bj);
        } else if (kind == "GT") {
            t.expect_count(9);
            const NodeId id = static_cast<NodeId>(t.integer(1, "gt node id"));
            require_node(id, t.line_no);
            if (!g_.ground_truth) g_.ground_truth.emplace();
            GroundTruthPose p;
            p.rotation = UnitQuaternion(t.number(2, "qw"), t.number(3, "qx"), t.number(4, "qy"),
                                        t.number(5, "qz"));
            p.center = Eigen::Vector3d(t.number(6, "cx"), t.number(7, "cy"), t.number(8, "cz"));
            if (!g_.ground_truth->emplace(id, p).second) {
                throw ParseError(t.line_no, "duplicate GT for node " + std::to_string(id));
            }
        } else {
            throw ParseError(t.line_no, "unknown record '" + kind + "'");
        }
    }

    ViewGraph finish(int last_line) {
        if (g_.ground_truth && g_.ground_truth->size() != g_.nodes.size()) {
            throw ParseError(last_line, "ground truth must cover every node or be absent");
        }
        return std::move(g_);
    }

private:
    void require_node(NodeId id, int line_no) const {
        if (!ids_.count(id)) {
            throw UnknownNodeRef("line " + std::to_string(line_no) + ": unknown node " +
                                 std::to_string(id));
        }
    }

    ViewGraph g_;
    std::set<NodeId> ids_;
    std::set<std::pair<NodeId, NodeId>> pairs_;
    std::map<std::pair<NodeId, NodeId>, std::size_t> edge_index_;
};

void append_graph_body(std::string& out, const ViewGraph& g) {
    for (const auto& n : g.nodes) {
        out += "NODE " + std::to_string(n.id) + " " + format_double(n.focal) + " " +
               std::to_string(n.width) + " " + std::to_string(n.height) + "\n";
    }
    for (const auto& e : g.edges) {
        out += "EDGE " + std::to_string(e.i) + " " + std::to_string(e.j);
        for (double v : {e.rotation.w(), e.rotation.x(), e.rotation.y(), e.rotation.z(),
                         e.translation_dir.x(), e.translation_dir.y(), e.translation_dir.z()}) {
            out += " " + format_double(v);
        }
        out += "\n";
        for (const auto& [bi, bj] : e.boxes) {
            out += "BOX " + std::to_string(e.i) + " " + std::to_string(e.j);
            for (double v : {bi.x, bi.y, bi.bb_w, bi.bb_h, bj.x, bj.y, bj.bb_w, bj.bb_h}) {
                out += " " + format_double(v);
            }
            out += "\n";
        }
    }
    if (g.ground_truth) {
        for (const auto& [id, p] : *g.ground_truth) {
            const UnitQuaternion& q = p.rotation;
            out += "GT " + std::to_string(id);
            for (double v : {q.w(), q.x(), q.y(), q.z(), p.center.x(), p.center.y(), p.center.z()}) {
                out += " " + format_double(v);
            }
            out += "\n";
        }
    }
}

} // namespace

ViewGraph parse_graph(const std::string& text) {
    GraphBuilder b;
    int last_line = 0;
    for (const auto& t : tokenize(text)) {
        if (t.tokens[0] == "GRAPH") {
            throw ParseError(t.line_no, "GRAPH header not allowed in single-graph input");
        }
        b.add_line(t);
        last_line = t.line_no;
    }
    return b.finish(last_line);
}

std::string serialize_graph(const ViewGraph& g) {
    std::string out;
    append_graph_body(out, g);
    return out;
}

std::vector<NamedGraph> parse_dataset(const std::string& text) {
    std::vector<NamedGraph> out;
    std::optional<GraphBuilder> current;
    std::string name;
    int last_line = 0;
    for (const auto& t : tokenize(text)) {
        if (t.tokens[0] == "GRAPH") {
            t.expect_count(2);
            if (current) out.push_back({name, current->finish(last_line)});
            current.emplace();
            name = t.tokens[1];
        } else {
            if (!current) throw ParseError(t.line_no, "record before first GRAPH header");
            current->add_line(t);
        }
        last_line = t.line_no;
    }
    if (current) out.push_back({name, current->finish(last_line)});
    return out;
}

std::string serialize_dataset(const std::vector<NamedGraph>& graphs) {
    std::string out;
    for (const auto& g : graphs) {
        out += "GRAPH " + g.name + "\n";
        append_graph_body(out, g.graph);
    }
    return out;
}

std::vector<NamedPoses> parse_poses(const std::string& text) {
    std::vector<NamedPoses> out;
    for (const auto& t : tokenize(text)) {
        if (t.tokens[0] != "POSE") throw ParseError(t.line_no, "unknown record '" + t.tokens[0] + "'");
        t.expect_count(10);
        const std::string& name = t.tokens[1];
        if (out.empty() || out.back().name != name) {
            out.push_back({name, AbsolutePoseSet{}});
        }
        AbsolutePoseSet::Pose p;
        p.rotation = UnitQuaternion(t.number(3, "qw"), t.number(4, "qx"), t.number(5, "qy"),
                                    t.number(6, "qz"))
                         .to_rotation();
        p.center = Eigen::Vector3d(t.number(7, "cx"), t.number(8, "cy"), t.number(9, "cz"));
        const NodeId id = static_cast<NodeId>(t.integer(2, "node id"));
        if (!out.back().poses.poses.emplace(id, p).second) {
            throw ParseError(t.line_no, "duplicate POSE for node " + std::to_string(id));
        }
    }
    return out;
}

std::string serialize_poses(const std::vector<NamedPoses>& sets) {
    std::string out;
    for (const auto& s : sets) {
        for (const auto& [id, p] : s.poses.poses) {
            const UnitQuaternion q = UnitQuaternion::from_rotation(p.rotation);
            out += "POSE " + s.name + " " + std::to_string(id);
            for (double v : {q.w(), q.x(), q.y(), q.z(), p.center.x(), p.center.y(), p.center.z()}) {
                out += " " + format_double(v);
            }
            out += "\n";
        }
    }
    return out;
}

} // namespace mavg
