package main

import (
	"context"

	"github.com/aws/aws-lambda-go/events"
	"github.com/aws/aws-lambda-go/lambda"
)

func handle(ctx context.Context, ev events.SQSEvent) error {
	for _, msg := range ev.Records {
		if err := scan(ctx, msg.Body); err != nil {
			return err
		}
	}
	return nil
}

func main() { lambda.Start(handle) }
