import { beforeEach, describe, expect, it } from 'vitest';
import { ApiClient, ApiError } from '../src/api';
import { installMockServer, MockServer } from './mockServer';

let server: MockServer;
let api: ApiClient;

beforeEach(() => {
  server = installMockServer();
  api = new ApiClient('');
});

describe('ApiClient', () => {
  it('creates a session and unwraps the envelope', async () => {
    const { session, revision } = await api.createSession();
    expect(session.stage).toBe('context');
    expect(revision).toBe(1);
    expect(server.lastRequest()).toMatchObject({ method: 'POST', path: '/v1/sessions' });
  });

  it('sends stage, payload, and revision on advance', async () => {
    const { session, revision } = await api.createSession();
    await api.advanceContext(session.id, {
      population: 'adults', unit: 'person', treatment: 'reminder', control: 'none',
      outcome: 'uptake', time_horizon: '3 months', assignment: 'randomized',
      sample_size_estimate: 100,
    }, revision);
    expect(server.lastRequest().body).toMatchObject({ stage: 'context', revision: 1 });
  });

  it('raises ApiError with the server code on 404', async () => {
    const err = await api.getSession('nope').catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.code).toBe('not_found');
  });

  it('surfaces stage conflicts with the expected stage and retryable flag', async () => {
    const { session, revision } = await api.createSession();
    const err = await api.advanceAtePre(session.id, 0.5, revision).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.code).toBe('stage_conflict');
    expect(err.expectedStage).toBe('context');
    expect(err.retryable).toBe(true);
  });

  it('surfaces validation errors naming the expected stage', async () => {
    const { session, revision } = await api.createSession();
    const err = await api
      .advance(session.id, 'context', { population: 42 }, revision)
      .catch((e) => e);
    expect(err.status).toBe(422);
    expect(err.code).toBe('validation');
    expect(err.expectedStage).toBe('context');
  });

  it('computes ATE from a type breakdown via the server', async () => {
    const result = await api.ate({ types: [0.3, 0.65, 0.0, 0.05] });
    expect(result.ate).toBeCloseTo(0.65, 12);
    expect(result.treat_rate).toBeCloseTo(0.95, 12);
  });

  it('passes the pinned seed through to diagnostics', async () => {
    await api.diagnostics({ se: 0.1, distribution: { schema_version: 1, components: [] }, seed: 77 });
    expect(server.lastRequest().body.seed).toBe(77);
  });
});
