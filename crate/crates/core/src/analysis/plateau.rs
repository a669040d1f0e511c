use super::AnalysisError;

/// Diversity counts per time step, with a burn-in prefix that analysis skips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversitySeries {
    values: Vec<u32>,
    burn_in: usize,
}

impl DiversitySeries {
    pub fn new(values: Vec<u32>, burn_in: usize) -> Result<Self, AnalysisError> {
        if burn_in >= values.len() {
            return Err(AnalysisError::EmptySeries { burn_in });
        }
        Ok(Self { values, burn_in })
    }

    /// Burn-in of `floor(fraction · len)` steps.
    pub fn with_burn_in_fraction(values: Vec<u32>, fraction: f64) -> Result<Self, AnalysisError> {
        if !(0.0..1.0).contains(&fraction) {
            return Err(AnalysisError::InvalidArgument {
                field: "burn_in",
                reason: format!("fraction {fraction} is outside [0, 1)"),
            });
        }
        let burn_in = (fraction * values.len() as f64).floor() as usize;
        Self::new(values, burn_in)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// The post-burn-in part of the series.
    pub fn analyzed(&self) -> &[u32] {
        &self.values[self.burn_in..]
    }
}

/// Waiting times `τ`: lengths of maximal constant runs, in order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlateauList {
    durations: Vec<u64>,
}

impl PlateauList {
    pub fn new(durations: Vec<u64>) -> Result<Self, AnalysisError> {
        if let Some(&value) = durations.iter().find(|&&d| d == 0) {
            return Err(AnalysisError::InvalidDatum { value });
        }
        Ok(Self { durations })
    }

    pub fn durations(&self) -> &[u64] {
        &self.durations
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    /// Sum of all durations; equals the analyzed series length.
    pub fn total(&self) -> u64 {
        self.durations.iter().sum()
    }

    pub fn max(&self) -> Option<u64> {
        self.durations.iter().copied().max()
    }

    /// Lower median.
    pub fn median(&self) -> Option<u64> {
        if self.durations.is_empty() {
            return None;
        }
        let mut sorted = self.durations.clone();
        let mid = (sorted.len() - 1) / 2;
        Some(*sorted.select_nth_unstable(mid).1)
    }

    /// Durations `≥ tau_min`.
    pub fn tail(&self, tau_min: u64) -> Vec<u64> {
        self.durations
            .iter()
            .copied()
            .filter(|&d| d >= tau_min)
            .collect()
    }
}

/// Run lengths of any sequence compared by equality.
pub fn run_lengths<T: PartialEq>(values: &[T]) -> Result<PlateauList, AnalysisError> {
    let Some(first) = values.first() else {
        return Err(AnalysisError::EmptySeries { burn_in: 0 });
    };
    let mut durations = Vec::new();
    let mut current = first;
    let mut len = 0u64;
    for v in values {
        if v == current {
            len += 1;
        } else {
            durations.push(len);
            current = v;
            len = 1;
        }
    }
    durations.push(len);
    Ok(PlateauList { durations })
}

/// Plateaus of the post-burn-in diversity series.
pub fn detect_plateaus(series: &DiversitySeries) -> Result<PlateauList, AnalysisError> {
    run_lengths(series.analyzed()).map_err(|_| AnalysisError::EmptySeries {
        burn_in: series.burn_in,
    })
}

/// Streaming run-length encoder: skips `burn_in` values, then accumulates
/// plateau durations one value at a time.
#[derive(Debug, Clone)]
pub struct PlateauTracker<T> {
    burn_in: usize,
    seen: usize,
    current: Option<T>,
    run: u64,
    durations: Vec<u64>,
}

impl<T: PartialEq + Copy> PlateauTracker<T> {
    pub fn new(burn_in: usize) -> Self {
        Self {
            burn_in,
            seen: 0,
            current: None,
            run: 0,
            durations: Vec::new(),
        }
    }

    pub fn push(&mut self, value: T) {
        self.seen += 1;
        if self.seen <= self.burn_in {
            return;
        }
        match self.current {
            Some(c) if c == value => self.run += 1,
            Some(_) => {
                self.durations.push(self.run);
                self.current = Some(value);
                self.run = 1;
            }
            None => {
                self.current = Some(value);
                self.run = 1;
            }
        }
    }

    /// Values pushed after the burn-in.
    pub fn analyzed_len(&self) -> usize {
        self.seen.saturating_sub(self.burn_in)
    }

    pub fn finish(mut self) -> Result<PlateauList, AnalysisError> {
        if self.current.is_none() {
            return Err(AnalysisError::EmptySeries {
                burn_in: self.burn_in,
            });
        }
        self.durations.push(self.run);
        Ok(PlateauList {
            durations: self.durations,
        })
    }
}

/// Running count of steps in which the product existed.
pub fn cumulative_activity(trajectory: &[bool]) -> Vec<u64> {
    trajectory
        .iter()
        .scan(0u64, |acc, &on| {
            *acc += u64::from(on);
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plateaus(v: &[u32]) -> Vec<u64> {
        detect_plateaus(&DiversitySeries::new(v.to_vec(), 0).unwrap())
            .unwrap()
            .durations()
            .to_vec()
    }

    #[test]
    fn run_lengths_of_mixed_series() {
        assert_eq!(plateaus(&[5, 5, 5, 7, 7, 4]), vec![3, 2, 1]);
    }

    #[test]
    fn constant_series_is_one_plateau() {
        assert_eq!(plateaus(&[9; 17]), vec![17]);
    }

    #[test]
    fn alternating_series_is_all_ones() {
        let v: Vec<u32> = (0..10).map(|i| 1 + i % 2).collect();
        assert_eq!(plateaus(&v), vec![1; 10]);
    }

    #[test]
    fn burn_in_is_skipped() {
        let s = DiversitySeries::new(vec![1, 1, 2, 2, 2], 1).unwrap();
        assert_eq!(detect_plateaus(&s).unwrap().durations(), &[1, 3]);
    }

    #[test]
    fn burn_in_must_leave_data() {
        assert!(matches!(
            DiversitySeries::new(vec![1, 2], 2),
            Err(AnalysisError::EmptySeries { burn_in: 2 })
        ));
        assert!(run_lengths::<u32>(&[]).is_err());
    }

    #[test]
    fn burn_in_fraction_rounds_down() {
        let s = DiversitySeries::with_burn_in_fraction(vec![0; 25], 0.1).unwrap();
        assert_eq!(s.burn_in(), 2);
        assert!(DiversitySeries::with_burn_in_fraction(vec![0; 5], 1.0).is_err());
    }

    #[test]
    fn tracker_without_data_is_empty_series() {
        let mut t = PlateauTracker::new(3);
        t.push(1u32);
        assert!(t.finish().is_err());
    }

    #[test]
    fn single_product_waiting_times() {
        let t = [true, true, false, false, false, true];
        assert_eq!(run_lengths(&t).unwrap().durations(), &[2, 3, 1]);
    }

    #[test]
    fn cumulative_activity_examples() {
        assert_eq!(cumulative_activity(&[false, false, false]), vec![0, 0, 0]);
        assert_eq!(
            cumulative_activity(&[true, false, true, true]),
            vec![1, 1, 2, 3]
        );
    }

    #[test]
    fn median_and_max() {
        let p = PlateauList::new(vec![4, 1, 9, 2]).unwrap();
        assert_eq!(p.median(), Some(2));
        assert_eq!(p.max(), Some(9));
        assert!(PlateauList::new(vec![1, 0]).is_err());
    }

    proptest! {
        #[test]
        fn durations_sum_to_analyzed_length(
            v in prop::collection::vec(0u32..4, 1..300),
            burn in 0usize..50,
        ) {
            prop_assume!(burn < v.len());
            let s = DiversitySeries::new(v.clone(), burn).unwrap();
            let p = detect_plateaus(&s).unwrap();
            prop_assert_eq!(p.total(), (v.len() - burn) as u64);
            prop_assert!(p.durations().iter().all(|&d| d >= 1));
        }

        #[test]
        fn streaming_tracker_matches_batch(
            v in prop::collection::vec(0u32..3, 1..300),
            burn in 0usize..40,
        ) {
            prop_assume!(burn < v.len());
            let mut t = PlateauTracker::new(burn);
            for &x in &v {
                t.push(x);
            }
            prop_assert_eq!(t.analyzed_len(), v.len() - burn);
            let batch = detect_plateaus(&DiversitySeries::new(v, burn).unwrap()).unwrap();
            prop_assert_eq!(t.finish().unwrap(), batch);
        }

        #[test]
        fn plateaus_ignore_monotone_relabeling(v in prop::collection::vec(0u32..6, 1..200)) {
            let relabeled: Vec<u32> = v.iter().map(|&x| 3 * x * x + 7).collect();
            prop_assert_eq!(plateaus(&v), plateaus(&relabeled));
        }

        #[test]
        fn cumulative_activity_differences_recover_input(t in prop::collection::vec(any::<bool>(), 1..200)) {
            let c = cumulative_activity(&t);
            let mut prev = 0;
            for (x, &on) in c.iter().zip(&t) {
                prop_assert_eq!(x - prev, u64::from(on));
                prev = *x;
            }
        }
    }
}
