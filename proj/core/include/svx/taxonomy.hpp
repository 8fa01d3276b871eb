#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace svx {

enum class Actor { human, animal };

enum class Action { climbing, crawling, eating, flying, jumping, running, spinning, walking };

enum class Background { static_scene, moving_scene };

inline constexpr std::array<Actor, 2> kActors = {Actor::human, Actor::animal};

inline constexpr std::array<Action, 8> kActions = {
    Action::climbing, Action::crawling, Action::eating,   Action::flying,
    Action::jumping,  Action::running,  Action::spinning, Action::walking};

inline constexpr std::array<Background, 2> kBackgrounds = {Background::static_scene,
                                                           Background::moving_scene};

std::string_view to_string(Actor actor);
std::string_view to_string(Action action);
std::string_view to_string(Background background);

// The parsers throw ParameterError on unknown names.
Actor parse_actor(std::string_view name);
Action parse_action(std::string_view name);
Background parse_background(std::string_view name);

std::optional<Actor> try_parse_actor(std::string_view name);
std::optional<Action> try_parse_action(std::string_view name);

}  // namespace svx
