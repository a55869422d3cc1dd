/** Typed client for the qpress job service. All numbers shown in the UI
 * come from these responses; the client never computes metric values. */

export interface CodecInfo {
  param_kind: string;
  param_min: number;
  param_max: number;
  quality_direction: string;
}

export interface MetricInfo {
  units: 'decibels' | 'unitless';
  lo: number;
  hi: number;
  default_tolerance: number;
}

export interface Meta {
  codecs: Record<string, CodecInfo>;
  metrics: Record<string, MetricInfo>;
}

export interface UploadInfo {
  image_id: string;
  kind: 'pgm' | 'raw';
  width: number;
  height: number;
  bit_depth: number;
  bands: number;
}

export interface JobSpec {
  image_id: string;
  kind: 'search' | 'estimate' | 'cube';
  codec_id: string;
  metric_id: string;
  target?: number;
  delta?: number;
  param_min?: number;
  param_max?: number;
  method: 'bisect' | 'interp';
  clamp?: boolean;
  homomorphic?: boolean;
}

export interface ProbeEntry {
  phase: 'endpoint' | 'search';
  param: number;
  value: number;
  band?: number;
}

export interface SearchReport {
  status: string;
  achieved: number;
  iterations: number;
  final_param: { kind: string; value: number };
  cr: number;
  bpp: number;
  target: number;
  delta: number;
  metric_id: string;
  codec_id: string;
  achievable_interval: [number, number];
  history: { param: number; value: number }[];
}

export interface EstimateReport {
  kind: 'estimate';
  value_at_param_min: number;
  value_at_param_max: number;
  achievable_interval: [number, number];
}

export interface JobSnapshot {
  job_id: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  submitted_at: number;
  spec: JobSpec;
  probes: ProbeEntry[];
  report: (SearchReport & Partial<EstimateReport>) | null;
  error: string | null;
  achievable_interval: [number, number] | null;
  diff_max: number | null;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = (await res.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  meta(): Promise<Meta> {
    return this.request<Meta>('/api/meta');
  }

  async uploadImage(file: Blob, descriptor?: Blob): Promise<UploadInfo> {
    const form = new FormData();
    form.append('file', file);
    if (descriptor) form.append('descriptor', descriptor);
    return this.request<UploadInfo>('/api/images', { method: 'POST', body: form });
  }

  async submitJob(spec: JobSpec): Promise<string> {
    const res = await this.request<{ job_id: string }>('/api/jobs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(spec),
    });
    return res.job_id;
  }

  pollJob(jobId: string): Promise<JobSnapshot> {
    return this.request<JobSnapshot>(`/api/jobs/${jobId}`);
  }

  async fetchArtifact(jobId: string, which: string, band = 0): Promise<ArrayBuffer> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/jobs/${jobId}/artifacts/${which}?band=${band}`,
    );
    if (!res.ok) throw new ApiError(res.status, res.statusText);
    return res.arrayBuffer();
  }
}

/** Poll a job until it leaves the queue; onUpdate fires for every snapshot
 * (the probe trace grows between calls while the job runs). */
export async function trackJob(
  api: ApiClient,
  jobId: string,
  onUpdate: (snap: JobSnapshot) => void,
  intervalMs = 500,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<JobSnapshot> {
  for (;;) {
    const snap = await api.pollJob(jobId);
    onUpdate(snap);
    if (snap.state === 'done' || snap.state === 'failed') return snap;
    await sleep(intervalMs);
  }
}
