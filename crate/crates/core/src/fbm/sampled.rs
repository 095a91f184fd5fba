use crate::error::{Error, Result};
use crate::scalar::Real;

/// Piecewise-linear function on a non-decreasing grid.
///
/// A node may appear twice in a row; the pair encodes a jump, with the first
/// value as the left limit and the second as the right limit. Step functions
/// are represented exactly this way and also keep their break/level data so
/// that Wiener integrals can use the defining finite sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: Vec<T>,
    values: Vec<T>,
    derivative: Option<Vec<T>>,
    steps: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            derivative: None,
            steps: None,
        })
    }

    pub fn from_fn(grid: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// Continuously differentiable function with its derivative sampled alongside.
    pub fn smooth(grid: Vec<T>, f: impl Fn(T) -> T, df: impl Fn(T) -> T) -> Result<Self> {
        let derivative = grid.iter().map(|&x| df(x)).collect();
        let mut out = Self::from_fn(grid, f)?;
        if out.has_jumps() {
            return Err(Error::domain("smooth function on a grid with repeated nodes"));
        }
        out.derivative = Some(derivative);
        Ok(out)
    }

    /// Step function equal to `levels[i]` on `(breaks[i], breaks[i+1]]`.
    pub fn step(breaks: Vec<T>, levels: Vec<T>) -> Result<Self> {
        if breaks.len() < 2 || levels.len() + 1 != breaks.len() {
            return Err(Error::domain("step function needs k+1 breaks for k levels"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("step breaks must be strictly increasing"));
        }
        let mut grid = Vec::with_capacity(2 * levels.len());
        let mut values = Vec::with_capacity(2 * levels.len());
        for (i, &a) in levels.iter().enumerate() {
            grid.push(breaks[i]);
            values.push(a);
            grid.push(breaks[i + 1]);
            values.push(a);
        }
        let mut out = Self::new(grid, values)?;
        out.steps = Some((breaks, levels));
        Ok(out)
    }

    /// `1_{[0, a]}` on `[0, end]`.
    pub fn indicator(a: T, end: T) -> Result<Self> {
        if !(a > T::zero() && a <= end) {
            return Err(Error::domain(format!("indicator needs 0 < a <= end, got a = {a}, end = {end}")));
        }
        if a == end {
            Self::step(vec![T::zero(), end], vec![T::one()])
        } else {
            Self::step(vec![T::zero(), a, end], vec![T::one(), T::zero()])
        }
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn derivative(&self) -> Option<&[T]> {
        self.derivative.as_deref()
    }

    /// Breaks and levels when built by [`SampledFunction::step`].
    pub fn step_data(&self) -> Option<(&[T], &[T])> {
        self.steps.as_ref().map(|(b, l)| (b.as_slice(), l.as_slice()))
    }

    pub fn domain(&self) -> (T, T) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn has_jumps(&self) -> bool {
        self.grid.windows(2).any(|w| w[0] == w[1])
    }

    /// Locations of repeated nodes.
    pub fn jumps(&self) -> Vec<T> {
        self.grid.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect()
    }

    /// Non-degenerate linear pieces `(x0, x1, v0, v1)`.
    pub fn segments(&self) -> impl Iterator<Item = (T, T, T, T)> + '_ {
        (0..self.grid.len() - 1).filter_map(move |i| {
            let (x0, x1) = (self.grid[i], self.grid[i + 1]);
            (x1 > x0).then(|| (x0, x1, self.values[i], self.values[i + 1]))
        })
    }

    /// Index of the piece containing `x`, preferring the piece that starts at `x`.
    fn locate(&self, x: T) -> usize {
        let n = self.grid.len();
        // last i with grid[i] <= x, then step back across a repeated node
        let mut i = self.grid.partition_point(|&g| g <= x).saturating_sub(1);
        if i >= n - 1 {
            i = n - 2;
            while i > 0 && self.grid[i] == self.grid[i + 1] {
                i -= 1;
            }
        }
        i
    }

    /// Right-continuous evaluation of the interpolant (left limit at the last node).
    pub fn eval(&self, x: T) -> T {
        let i = self.locate(x);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        if x1 == x0 {
            return self.values[i + 1];
        }
        let w = (x - x0) / (x1 - x0);
        self.values[i] + (self.values[i + 1] - self.values[i]) * w
    }

    /// Value and slope of the piece containing `x`.
    pub fn piece_at(&self, x: T) -> (T, T) {
        let i = self.locate(x);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        if x1 == x0 {
            return (self.values[i + 1], T::zero());
        }
        let slope = (self.values[i + 1] - self.values[i]) / (x1 - x0);
        (self.values[i] + slope * (x - x0), slope)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    /// Pointwise combination; both operands must share the grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::domain("operands of a binary operation must share their grid"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Self::new(self.grid.clone(), values)
    }
}

fn validate_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::domain("sampled function needs at least two nodes"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("grid contains non-finite nodes"));
    }
    for w in grid.windows(2) {
        if w[1] < w[0] {
            return Err(Error::domain("grid must be non-decreasing"));
        }
    }
    for w in grid.windows(3) {
        if w[0] == w[1] && w[1] == w[2] {
            return Err(Error::domain("a node may repeat at most once"));
        }
    }
    if grid[0] == grid[1] || grid[grid.len() - 1] == grid[grid.len() - 2] {
        return Err(Error::domain("jumps are not allowed at the grid ends"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_evaluation() {
        let f = SampledFunction::step(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(f.eval(0.2), 1.0);
        assert_eq!(f.eval(0.5), -1.0);
        assert_eq!(f.eval(0.7), -1.0);
        assert_eq!(f.eval(1.0), -1.0);
        assert_eq!(f.jumps(), vec![0.5]);
        assert_eq!(f.segments().count(), 2);
    }

    #[test]
    fn linear_interpolation() {
        let f = SampledFunction::from_fn(vec![0.0, 1.0, 3.0], |x| x * x).unwrap();
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(2.0), 5.0);
        assert_eq!(f.eval(3.0), 9.0);
        assert_eq!(f.piece_at(2.0), (5.0, 4.0));
    }

    #[test]
    fn grid_validation() {
        assert!(SampledFunction::new(vec![0.0, 1.0, 0.5], vec![0.0; 3]).is_err());
        assert!(SampledFunction::new(vec![0.0, 0.5, 0.5, 0.5, 1.0], vec![0.0; 5]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![0.0]).is_err());
        let a = SampledFunction::from_fn(vec![0.0, 1.0], |x| x).unwrap();
        let b = SampledFunction::from_fn(vec![0.0, 2.0], |x| x).unwrap();
        assert!(a.zip_with(&b, |x, y| x + y).is_err());
        assert!(SampledFunction::smooth(vec![0.0, 0.5, 0.5, 1.0], |x| x, |_| 1.0).is_err());
    }
}
