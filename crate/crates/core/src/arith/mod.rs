pub mod algebraic;
pub mod factor;
pub mod field;
pub mod poly;
pub mod ring;
pub mod roots;
pub mod series;

pub use algebraic::AlgebraicNumber;
pub use field::{NfElem, NumberField};
pub use poly::{IntPoly, RatPoly};
pub use ring::{FieldOps, Ring};
pub use series::TruncatedSeries;
