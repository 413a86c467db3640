//! Nearest-neighbor regression by linear scan; uniform or inverse-distance
//! weighting. Stores the training matrix verbatim, no training phase.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeighting {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<f64>,
    pub k: usize,
    pub weighting: KnnWeighting,
}

impl KnnModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
                (d2.sqrt(), i)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let neighbors = &dist[..self.k.min(dist.len())];
        match self.weighting {
            KnnWeighting::Uniform => {
                neighbors.iter().map(|&(_, i)| self.ys[i]).sum::<f64>() / neighbors.len() as f64
            }
            KnnWeighting::Distance => {
                // an exact match dominates all weighted neighbors
                if let Some(&(_, i)) = neighbors.iter().find(|(d, _)| *d == 0.0) {
                    return self.ys[i];
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for &(d, i) in neighbors {
                    num += self.ys[i] / d;
                    den += 1.0 / d;
                }
                num / den
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(weighting: KnnWeighting, k: usize) -> KnnModel {
        KnnModel {
            xs: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]],
            ys: vec![10.0, 20.0, 30.0],
            k,
            weighting,
        }
    }

    #[test]
    fn k1_memorizes() {
        let m = model(KnnWeighting::Uniform, 1);
        assert_eq!(m.predict(&[1.0, 0.0]), 20.0);
    }

    #[test]
    fn distance_weighting_exact_match() {
        let m = model(KnnWeighting::Distance, 3);
        assert_eq!(m.predict(&[0.0, 2.0]), 30.0);
    }

    #[test]
    fn uniform_averages_k_neighbors() {
        let m = model(KnnWeighting::Uniform, 2);
        // nearest two to the origin are (0,0) and (1,0)
        assert_eq!(m.predict(&[0.1, 0.0]), 15.0);
    }
}
