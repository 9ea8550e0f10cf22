//! Built-in small games used across tests and examples.
//!
//! `notation_game` is a three-player game with a chance root (1/7, 2/7, 4/7)
//! exercising every kernel; `firstgame` has three equilibrium components, one
//! of them fully mixed; `secondgame` has proper subgames, so its Nash and
//! subgame-perfect solution sets differ.

use crate::format::parse_game;
use crate::game::Game;

pub const NOTATION_GAME: &str = include_str!("../fixtures/notation.game.json");
pub const FIRSTGAME: &str = include_str!("../fixtures/firstgame.game.json");
pub const SECONDGAME: &str = include_str!("../fixtures/secondgame.game.json");

pub fn notation_game() -> Game {
    parse_game(NOTATION_GAME).expect("built-in game is valid")
}

pub fn firstgame() -> Game {
    parse_game(FIRSTGAME).expect("built-in game is valid")
}

pub fn secondgame() -> Game {
    parse_game(SECONDGAME).expect("built-in game is valid")
}
