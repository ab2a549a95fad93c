#include "cgforge/move.hpp"

namespace cgforge {

std::string to_string(MoveKind k) {
    switch (k) {
        case MoveKind::add:
            return "add";
        case MoveKind::remove:
            return "delete";
        case MoveKind::reverse:
            return "reverse";
    }
    return "?";
}

std::string to_string(const Move& m) {
    return to_string(m.kind) + " " + std::to_string(m.edge.from) + "->" + std::to_string(m.edge.to);
}

void apply_move(Dag& g, const Move& m) {
    switch (m.kind) {
        case MoveKind::add:
            g.add_edge(m.edge);
            break;
        case MoveKind::remove:
            g.remove_edge(m.edge);
            break;
        case MoveKind::reverse:
            g.reverse_edge(m.edge);
            break;
    }
}

}  // namespace cgforge
