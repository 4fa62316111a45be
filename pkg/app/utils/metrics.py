from prometheus_client import (
    CollectorRegistry,
    Counter,
    Histogram,
    generate_latest,
    write_to_textfile,
)

# Pull counts span several orders of magnitude
STOPPING_TIME_BUCKETS = tuple(10.0 ** k for k in range(1, 10))


class CampaignMetrics:
    """Prometheus metrics for one campaign, kept on a private registry"""

    def __init__(self):
        self.registry = CollectorRegistry()

        self.runs = Counter(
            'lingape_runs_total',
            'Completed identification runs',
            ['algorithm', 'status'],
            registry=self.registry
        )

        self.stopping_time = Histogram(
            'lingape_stopping_time_pulls',
            'Stopping time of conclusive runs in pulls',
            ['algorithm'],
            buckets=STOPPING_TIME_BUCKETS,
            registry=self.registry
        )

        self.duration = Histogram(
            'lingape_run_duration_seconds',
            'Wall-clock duration of a run',
            ['algorithm'],
            registry=self.registry
        )

    def track_run(self, algorithm: str, status: str, tau: int,
                  duration: float):
        """Track one completed run"""
        self.runs.labels(algorithm=algorithm, status=status).inc()
        if status == "conclusive":
            self.stopping_time.labels(algorithm=algorithm).observe(tau)
        self.duration.labels(algorithm=algorithm).observe(duration)

    def get_metrics(self) -> bytes:
        """Get metrics in Prometheus text format"""
        return generate_latest(self.registry)

    def write(self, path: str):
        """Write the registry as a node-exporter text file"""
        write_to_textfile(path, self.registry)
