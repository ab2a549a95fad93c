#ifndef CGFORGE_MOVE_HPP
#define CGFORGE_MOVE_HPP

#include <compare>
#include <string>

#include "cgforge/graph.hpp"

namespace cgforge {

// Declaration order is the deterministic move order: add < remove < reverse.
enum class MoveKind { add = 0, remove = 1, reverse = 2 };

struct Move {
    MoveKind kind = MoveKind::add;
    Edge edge;

    friend auto operator<=>(const Move&, const Move&) = default;
};

std::string to_string(MoveKind k);
std::string to_string(const Move& m);

// Applies a guarded edit; throws StructuralError when illegal.
void apply_move(Dag& g, const Move& m);

}  // namespace cgforge

#endif  // CGFORGE_MOVE_HPP
