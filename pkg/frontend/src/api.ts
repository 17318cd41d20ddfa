// Typed client for the question-answering HTTP API (contract version 1).

export interface FigureRef {
    figure_id: string;
    label: string;
    caption: string;
    uri: string;
}

export interface ScoredAnswer {
    chunk_id: string;
    text: string;
    figures: FigureRef[];
    score: number;
}

export interface ScoredExamQA {
    qa_id: string;
    question: string;
    answer: string;
    score: number;
}

export interface QueryResult {
    question_id: string;
    question_text: string;
    answers: ScoredAnswer[];
    related: ScoredExamQA[];
    answered: boolean;
    message?: string;
}

export interface HealthInfo {
    status: string;
    answer_entries: number;
    exam_entries: number;
    model_id: string;
}

export class ApiFailure extends Error {
    status: number;
    retryable: boolean;

    constructor(status: number, detail: string, retryable: boolean) {
        super(detail);
        this.status = status;
        this.retryable = retryable;
    }
}

async function failureFrom(response: Response): Promise<ApiFailure> {
    let detail = `request failed with status ${response.status}`;
    let retryable = response.status === 503 || response.status === 429;
    try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
        if (body && typeof body.retryable === 'boolean') retryable = body.retryable;
    } catch {
        // non-JSON error body; keep the status-based defaults
    }
    return new ApiFailure(response.status, detail, retryable);
}

export class ApiClient {
    private base: string;

    constructor(base = '') {
        this.base = base;
    }

    async ask(question: string, clientId: string, signal?: AbortSignal): Promise<QueryResult> {
        const response = await fetch(`${this.base}/api/ask`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ question: question, client_id: clientId }),
            signal: signal,
        });
        if (!response.ok) {
            throw await failureFrom(response);
        }
        return (await response.json()) as QueryResult;
    }

    async sendFeedback(
        questionId: string,
        position: number,
        helpful: boolean,
        clientId: string,
    ): Promise<void> {
        const response = await fetch(`${this.base}/api/feedback`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({
                question_id: questionId,
                position: position,
                helpful: helpful,
                client_id: clientId,
            }),
        });
        if (response.status !== 204) {
            throw await failureFrom(response);
        }
    }

    async health(): Promise<HealthInfo> {
        const response = await fetch(`${this.base}/api/health`);
        if (!response.ok) {
            throw await failureFrom(response);
        }
        return (await response.json()) as HealthInfo;
    }
}
