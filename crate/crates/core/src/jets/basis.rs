use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::MAX_ORDER;

/// Graded monomial basis for truncated polynomials in `nvars` variables up to
/// total degree [`MAX_ORDER`], with precomputed product and derivative tables.
///
/// Monomials are ordered by total degree, so a jet of order `k` is a prefix of
/// length `len_upto[k]`.
#[derive(Debug)]
pub(crate) struct Basis {
    pub nvars: usize,
    #[cfg_attr(not(test), allow(dead_code))]
    pub exponents: Vec<Vec<u8>>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub degree: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    pub len_upto: [usize; MAX_ORDER + 1],
    /// `(lhs, rhs, target)` sorted by the degree of `target`.
    pub products: Vec<[u32; 3]>,
    pub products_upto: [usize; MAX_ORDER + 1],
    /// Per variable: `(source, target, factor)` sorted by the degree of `source`.
    pub derivatives: Vec<Vec<(u32, u32, f64)>>,
    /// Per variable: number of derivative entries whose source degree is `<= k`.
    pub derivatives_upto: Vec<[usize; MAX_ORDER + 1]>,
    /// `Π α_a!` for each monomial; turns Taylor coefficients into partials.
    pub factorial_weight: Vec<f64>,
}

impl Basis {
    fn build(nvars: usize) -> Basis {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut len_upto = [0; MAX_ORDER + 1];
        for (d, slot) in len_upto.iter_mut().enumerate() {
            let mut current = vec![0u8; nvars];
            push_with_degree(&mut exponents, &mut current, 0, d);
            *slot = exponents.len();
        }
        let degree: Vec<usize> = exponents
            .iter()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .collect();
        let lookup: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut products = Vec::new();
        for i in 0..exponents.len() {
            for j in 0..exponents.len() {
                if degree[i] + degree[j] > MAX_ORDER {
                    continue;
                }
                let sum: Vec<u8> = exponents[i]
                    .iter()
                    .zip(&exponents[j])
                    .map(|(a, b)| a + b)
                    .collect();
                products.push([i as u32, j as u32, lookup[&sum] as u32]);
            }
        }
        products.sort_by_key(|t| degree[t[2] as usize]);
        let mut products_upto = [0; MAX_ORDER + 1];
        for (k, slot) in products_upto.iter_mut().enumerate() {
            *slot = products.partition_point(|t| degree[t[2] as usize] <= k);
        }

        let mut derivatives = Vec::with_capacity(nvars);
        let mut derivatives_upto = Vec::with_capacity(nvars);
        for var in 0..nvars {
            let mut entries = Vec::new();
            for (src, e) in exponents.iter().enumerate() {
                if e[var] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[var] -= 1;
                entries.push((src as u32, lookup[&lowered] as u32, e[var] as f64));
            }
            entries.sort_by_key(|t| degree[t.0 as usize]);
            let mut upto = [0; MAX_ORDER + 1];
            for (k, slot) in upto.iter_mut().enumerate() {
                *slot = entries.partition_point(|t| degree[t.0 as usize] <= k);
            }
            derivatives.push(entries);
            derivatives_upto.push(upto);
        }

        let factorial_weight = exponents
            .iter()
            .map(|e| e.iter().map(|&k| factorial(k as usize)).product())
            .collect();

        Basis {
            nvars,
            exponents,
            degree,
            lookup,
            len_upto,
            products,
            products_upto,
            derivatives,
            derivatives_upto,
            factorial_weight,
        }
    }

    /// Shared basis for `nvars` variables.
    pub fn for_vars(nvars: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(nvars)
            .or_insert_with(|| Arc::new(Basis::build(nvars)))
            .clone()
    }

    pub fn index_of(&self, exponent: &[u8]) -> Option<usize> {
        self.lookup.get(exponent).copied()
    }
}

fn push_with_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_with_degree(out, current, var + 1, remaining - k);
    }
    current[var] = 0;
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
