//! Exterior calculus on phase space by finite differences, and Pfaffians.

use crate::{Mat7, Result, Vec7};

/// Steps `h·max(1, |p_a|)` per coordinate.
pub fn relative_steps(p: &Vec7, h: f64) -> Vec7 {
    p.map(|x| h * x.abs().max(1.0))
}

/// Seven-point (sixth-order) central difference of `f` at `p` along coordinate `a`.
fn diff7<T, F>(f: &F, p: &Vec7, a: usize, steps: &Vec7) -> Result<T>
where
    F: Fn(&Vec7) -> Result<T>,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let he = steps[a];
    let mut e = Vec7::zeros();
    e[a] = he;
    let d1 = f(&(p + e))? - f(&(p - e))?;
    let d2 = f(&(p + e * 2.0))? - f(&(p - e * 2.0))?;
    let d3 = f(&(p + e * 3.0))? - f(&(p - e * 3.0))?;
    Ok((d1 * 45.0 - d2 * 9.0 + d3) * (1.0 / (60.0 * he)))
}

/// `(dθ)[a][b] = ∂_a θ_b − ∂_b θ_a` by seven-point differences.
pub fn exterior_derivative_1form<F>(theta: F, p: &Vec7, steps: &Vec7) -> Result<Mat7>
where
    F: Fn(&Vec7) -> Result<Vec7>,
{
    let j = gradient_matrix(theta, p, steps)?;
    Ok(j - j.transpose())
}

/// `J[a][b] = ∂_a θ_b` by seven-point differences.
pub fn gradient_matrix<F>(theta: F, p: &Vec7, steps: &Vec7) -> Result<Mat7>
where
    F: Fn(&Vec7) -> Result<Vec7>,
{
    let mut j = Mat7::zeros();
    for a in 0..7 {
        let d: Vec7 = diff7(&theta, p, a, steps)?;
        j.set_row(a, &d.transpose());
    }
    Ok(j)
}

/// Gradient of a scalar phase function by seven-point differences.
pub fn gradient_fd<F>(f: F, p: &Vec7, steps: &Vec7) -> Result<Vec7>
where
    F: Fn(&Vec7) -> Result<f64>,
{
    let mut g = Vec7::zeros();
    for a in 0..7 {
        g[a] = diff7(&f, p, a, steps)?;
    }
    Ok(g)
}

/// Jacobian `J[(a, b)] = ∂_b Y^a` of a vector field by seven-point differences.
pub fn vector_jacobian_fd<F>(y: F, p: &Vec7, steps: &Vec7) -> Result<Mat7>
where
    F: Fn(&Vec7) -> Result<Vec7>,
{
    let mut j = Mat7::zeros();
    for b in 0..7 {
        let d: Vec7 = diff7(&y, p, b, steps)?;
        j.set_column(b, &d);
    }
    Ok(j)
}

/// Ridders extrapolation of central differences of `f` along coordinate `a`.
///
/// Starts from `steps[a]` (halving while `f` fails there), shrinks by 1.4 per level
/// and returns the tableau entry with the smallest error estimate.
fn ridders(f: &dyn Fn(&Vec7) -> Result<Mat7>, p: &Vec7, a: usize, steps: &Vec7) -> Result<Mat7> {
    const SHRINK: f64 = 1.4;
    const LEVELS: usize = 12;
    let central = |h: f64| -> Result<Mat7> {
        let mut e = Vec7::zeros();
        e[a] = h;
        Ok((f(&(p + e))? - f(&(p - e))?) / (2.0 * h))
    };
    let mut h = steps[a];
    let first = loop {
        match central(h) {
            Ok(d) => break d,
            Err(e) if h <= steps[a] / 64.0 => return Err(e),
            Err(_) => h *= 0.5,
        }
    };
    let mut prev: Vec<Mat7> = vec![first];
    let mut best = first;
    let mut best_err = f64::INFINITY;
    for _ in 1..LEVELS {
        h /= SHRINK;
        let mut row = vec![central(h)?];
        let mut fac = SHRINK * SHRINK;
        for j in 1..=prev.len() {
            let next = (row[j - 1] * fac - prev[j - 1]) / (fac - 1.0);
            fac *= SHRINK * SHRINK;
            let err = (next - row[j - 1]).amax().max((next - prev[j - 1]).amax());
            if err <= best_err {
                best_err = err;
                best = next;
            }
            row.push(next);
        }
        prev = row;
    }
    Ok(best)
}

/// `max |∂_a Ω_bc + ∂_b Ω_ca + ∂_c Ω_ab|` over `a < b < c`, with derivatives by Ridders
/// extrapolation from initial steps `steps`. Components of `Ω` grow large near the light cone, where no single
/// fixed step balances truncation against roundoff.
pub fn closure_residual_2form<F>(omega: F, p: &Vec7, steps: &Vec7) -> Result<f64>
where
    F: Fn(&Vec7) -> Result<Mat7>,
{
    let mut d = [Mat7::zeros(); 7];
    for (a, da) in d.iter_mut().enumerate() {
        *da = ridders(&omega, p, a, steps)?;
    }
    let mut r: f64 = 0.0;
    for a in 0..7 {
        for b in (a + 1)..7 {
            for c in (b + 1)..7 {
                r = r.max((d[a][(b, c)] + d[b][(c, a)] + d[c][(a, b)]).abs());
            }
        }
    }
    Ok(r)
}

/// Lie bracket `[Y, Z]^a = Y^b ∂_b Z^a − Z^b ∂_b Y^a` by seven-point differences.
pub fn commutator_fd<F, G>(y: F, z: G, p: &Vec7, steps: &Vec7) -> Result<Vec7>
where
    F: Fn(&Vec7) -> Result<Vec7>,
    G: Fn(&Vec7) -> Result<Vec7>,
{
    let yp = y(p)?;
    let zp = z(p)?;
    let jy = vector_jacobian_fd(&y, p, steps)?;
    let jz = vector_jacobian_fd(&z, p, steps)?;
    Ok(jz * yp - jy * zp)
}

/// Pfaffian of an antisymmetric matrix of even size, by expansion along the first row.
pub fn pfaffian(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 1..n {
        if a[0][j] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<f64>> = keep.iter().map(|&r| keep.iter().map(|&c| a[r][c]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * a[0][j] * pfaffian(&minor);
    }
    total
}

/// Coefficient of `e⁰∧…∧e⁶` in `w ∧ Ω ∧ Ω ∧ Ω`, with `Ω = Σ_{a<b} M[a][b] eᵃ∧eᵇ`.
pub fn top_form_coefficient(w: &Vec7, omega: &Mat7) -> f64 {
    let mut total = 0.0;
    for k in 0..7 {
        if w[k] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (0..7).filter(|&i| i != k).collect();
        let minor: Vec<Vec<f64>> =
            keep.iter().map(|&r| keep.iter().map(|&c| omega[(r, c)]).collect()).collect();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * w[k] * pfaffian(&minor);
    }
    6.0 * total
}
